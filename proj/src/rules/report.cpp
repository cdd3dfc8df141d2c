#include "textfeat/rules.hpp"
#include "textfeat/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace textfeat {

namespace {

Json rule_json(const ClassificationRule& rule) {
    Json doc;
    Json antecedent = Json::array();
    for (const auto& item : rule.antecedent) antecedent.push_back({{"attribute", item.attribute}, {"value", item.value}});
    doc["antecedent"] = std::move(antecedent);
    doc["consequent"] = {{"attribute", rule.consequent.attribute}, {"value", rule.consequent.value}};
    doc["support"] = rule.support;
    doc["cover"] = rule.cover;
    doc["confidence"] = rule.confidence;
    return doc;
}

Json action_rule_json(const ActionRule& rule, std::size_t id) {
    Json doc;
    doc["id"] = id;
    Json stable = Json::array();
    for (const auto& s : rule.stable_conditions) stable.push_back({{"attribute", s.attribute}, {"value", s.value}});
    doc["stable_conditions"] = std::move(stable);
    Json actions = Json::array();
    for (const auto& a : rule.actions) {
        actions.push_back({{"attribute", a.attribute}, {"from", a.from}, {"to", a.to}, {"changes", a.changes()}});
    }
    doc["actions"] = std::move(actions);
    doc["target"] = {{"attribute", rule.target}, {"from", rule.undesired_state}, {"to", rule.desired_state}};
    doc["uplift"] = rule.uplift;
    doc["undesired_rule"] = rule_json(rule.undesired_rule);
    doc["desired_rule"] = rule_json(rule.desired_rule);
    doc["description"] = rule.describe();
    return doc;
}

Json rule_list(const std::vector<ActionRule>& rules) {
    Json out = Json::array();
    for (std::size_t i = 0; i < rules.size(); ++i) out.push_back(action_rule_json(rules[i], i + 1));
    return out;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
    return buf;
}

std::string table_text(const std::vector<ActionRule>& rules, const std::string& prefix) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Rule", "Stable conditions", "Actions", "Target", "Uplift"});
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto& r = rules[i];
        std::vector<std::string> stable;
        for (const auto& s : r.stable_conditions) stable.push_back(s.attribute + " = " + s.value);
        std::vector<std::string> actions;
        for (const auto& a : r.actions) {
            actions.push_back(a.changes() ? a.attribute + " = (" + a.from + " -> " + a.to + ")"
                                          : a.attribute + " = " + a.from);
        }
        rows.push_back({prefix + std::to_string(i + 1), stable.empty() ? "-" : text::join(stable, " ^ "),
                        text::join(actions, " ^ "),
                        r.target + " = (" + r.undesired_state + " -> " + r.desired_state + ")", percent(r.uplift)});
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::string line;
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c) line += " | ";
            line += rows[r][c];
            if (c + 1 < rows[r].size()) line.append(width[c] - rows[r][c].size(), ' ');
        }
        out += line + "\n";
        if (r == 0) {
            std::string rule;
            for (std::size_t c = 0; c < width.size(); ++c) {
                if (c) rule += "-+-";
                rule.append(width[c], '-');
            }
            out += rule + "\n";
        }
    }
    return out;
}

}  // namespace

Json RuleReport::to_json() const {
    Json doc;
    doc["settings"] = settings.to_json();
    doc["dataset_size"] = dataset_size;
    doc["discovered_count"] = discovered.size();
    doc["discovered"] = rule_list(discovered);
    if (dominance_applied) {
        doc["dominant_count"] = dominant.size();
        doc["dominant"] = rule_list(dominant);
    }
    return doc;
}

std::string RuleReport::to_text() const {
    std::string out = "target: " + settings.target + " (" + settings.undesired_state + " -> " +
                      settings.desired_state + ")\n";
    out += "dataset size: " + std::to_string(dataset_size) + "\n";
    out += "discovered action rules: " + std::to_string(discovered.size()) + "\n";
    out += "dominant action rules: " + (dominance_applied ? std::to_string(dominant.size()) : std::string("-")) +
           "\n\n";
    if (dominance_applied) {
        out += "dominant rules\n" + table_text(dominant, "r");
    } else {
        out += "discovered rules\n" + table_text(discovered, "r");
    }
    return out;
}

}  // namespace textfeat

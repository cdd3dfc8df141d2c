#include "index.hpp"

#include "textfeat/error.hpp"
#include "textfeat/rules.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace textfeat {

namespace {

// Grouping key for pairing: stable items plus the flexible attribute names.
struct PairKey {
    std::vector<Item> stable;
    std::vector<std::string> flexible;

    auto operator<=>(const PairKey&) const = default;
};

struct SplitAntecedent {
    PairKey key;
    std::map<std::string, std::string> flexible_values;
};

SplitAntecedent split_antecedent(const ClassificationRule& rule, const std::set<std::string>& stable,
                                 const std::set<std::string>& flexible) {
    SplitAntecedent out;
    for (const auto& item : rule.antecedent) {
        if (stable.count(item.attribute)) {
            out.key.stable.push_back(item);
        } else if (flexible.count(item.attribute)) {
            out.key.flexible.push_back(item.attribute);
            out.flexible_values[item.attribute] = item.value;
        } else {
            throw SettingsError("rule item '" + item.attribute + "' is neither stable nor flexible");
        }
    }
    std::sort(out.key.stable.begin(), out.key.stable.end());
    std::sort(out.key.flexible.begin(), out.key.flexible.end());
    return out;
}

std::set<std::string> constraint_set(const ActionRule& rule) {
    std::set<std::string> out;
    for (const auto& s : rule.stable_conditions) out.insert("s\x1f" + s.attribute + "\x1f" + s.value);
    for (const auto& a : rule.actions) out.insert("f\x1f" + a.attribute + "\x1f" + a.from + "\x1f" + a.to);
    return out;
}

bool strict_subset(const std::set<std::string>& a, const std::set<std::string>& b) {
    return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<std::string> string_list(const Json& doc, const char* key) {
    std::vector<std::string> out;
    if (!doc.contains(key)) return out;
    for (const auto& v : doc[key]) out.push_back(v.get<std::string>());
    return out;
}

std::string state_string(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

void MiningSettings::validate() const {
    std::set<std::string> stable(stable_attributes.begin(), stable_attributes.end());
    std::set<std::string> flexible(flexible_attributes.begin(), flexible_attributes.end());
    if (stable.size() != stable_attributes.size()) throw SettingsError("stable attribute listed twice");
    if (flexible.size() != flexible_attributes.size()) throw SettingsError("flexible attribute listed twice");
    for (const auto& a : stable) {
        if (flexible.count(a)) throw SettingsError("attribute '" + a + "' is both stable and flexible");
    }
    if (target.empty()) throw SettingsError("mining settings need a target");
    if (stable.count(target) || flexible.count(target)) {
        throw SettingsError("target '" + target + "' cannot be a stable or flexible attribute");
    }
    if (undesired_state == desired_state) throw SettingsError("undesired and desired states are equal");
    if (min_flexible < 1) throw SettingsError("min_flexible_attributes must be at least 1");
    if (flexible.empty()) throw SettingsError("no flexible attributes given");
    if (min_stable > stable.size()) {
        throw SettingsError("min_stable_attributes exceeds the number of stable attributes");
    }
    if (min_undesired_support < 1 || min_desired_support < 1) {
        throw SettingsError("minimum supports must be at least 1");
    }
    for (double c : {min_undesired_confidence, min_desired_confidence}) {
        if (!(c > 0.0 && c <= 1.0)) throw SettingsError("minimum confidences must lie in (0, 1]");
    }
}

MiningSettings MiningSettings::from_json(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("mining settings must be an object");
    MiningSettings s;
    try {
        s.stable_attributes = string_list(doc, "stable_attributes");
        s.flexible_attributes = string_list(doc, "flexible_attributes");
        s.min_stable = doc.value("min_stable_attributes", std::size_t{0});
        s.min_flexible = doc.value("min_flexible_attributes", std::size_t{1});
        s.min_undesired_support = doc.at("min_undesired_support").get<std::size_t>();
        s.min_desired_support = doc.at("min_desired_support").get<std::size_t>();
        s.min_undesired_confidence = doc.at("min_undesired_confidence").get<double>();
        s.min_desired_confidence = doc.at("min_desired_confidence").get<double>();
        s.target = doc.at("target").get<std::string>();
        s.undesired_state = state_string(doc.at("undesired_state"));
        s.desired_state = state_string(doc.at("desired_state"));
        s.keep_negative_uplift = doc.value("keep_negative_uplift", false);
        s.reduce_dominant = doc.value("dominant", true);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("mining settings: ") + e.what());
    }
    return s;
}

Json MiningSettings::to_json() const {
    Json doc;
    doc["stable_attributes"] = stable_attributes;
    doc["flexible_attributes"] = flexible_attributes;
    doc["min_stable_attributes"] = min_stable;
    doc["min_flexible_attributes"] = min_flexible;
    doc["min_undesired_support"] = min_undesired_support;
    doc["min_desired_support"] = min_desired_support;
    doc["min_undesired_confidence"] = min_undesired_confidence;
    doc["min_desired_confidence"] = min_desired_confidence;
    doc["target"] = target;
    doc["undesired_state"] = undesired_state;
    doc["desired_state"] = desired_state;
    doc["keep_negative_uplift"] = keep_negative_uplift;
    doc["dominant"] = reduce_dominant;
    return doc;
}

std::size_t ActionRule::changed_count() const {
    return static_cast<std::size_t>(std::count_if(actions.begin(), actions.end(),
                                                  [](const ActionStep& a) { return a.changes(); }));
}

std::string ActionRule::describe() const {
    std::string out;
    auto add = [&](const std::string& part) {
        if (!out.empty()) out += " ^ ";
        out += part;
    };
    for (const auto& s : stable_conditions) add(s.attribute + " = " + s.value);
    for (const auto& a : actions) {
        add(a.changes() ? a.attribute + " = (" + a.from + " -> " + a.to + ")" : a.attribute + " = " + a.from);
    }
    return out + " => " + target + " = (" + undesired_state + " -> " + desired_state + ")";
}

double compute_uplift(const ClassificationRule& undesired, const ClassificationRule& desired,
                      std::size_t dataset_size) {
    if (dataset_size == 0) throw SettingsError("uplift needs a non-empty dataset");
    if (!(undesired.confidence > 0.0)) throw SettingsError("uplift undefined for zero undesired confidence");
    const double reach = static_cast<double>(undesired.support) / undesired.confidence;
    return (desired.confidence - (1.0 - undesired.confidence)) * reach / static_cast<double>(dataset_size);
}

void sort_rules(std::vector<ActionRule>& rules) {
    std::vector<std::pair<std::string, std::size_t>> keys;
    keys.reserve(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) keys.emplace_back(rules[i].describe(), i);
    std::vector<std::size_t> order(rules.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rules[a].uplift != rules[b].uplift) return rules[a].uplift > rules[b].uplift;
        return keys[a].first < keys[b].first;
    });
    std::vector<ActionRule> sorted;
    sorted.reserve(rules.size());
    for (auto i : order) sorted.push_back(std::move(rules[i]));
    rules = std::move(sorted);
}

std::vector<ActionRule> pair_action_rules(std::span<const ClassificationRule> undesired_rules,
                                          std::span<const ClassificationRule> desired_rules,
                                          const MiningSettings& settings, std::size_t dataset_size) {
    settings.validate();
    const std::set<std::string> stable(settings.stable_attributes.begin(), settings.stable_attributes.end());
    const std::set<std::string> flexible(settings.flexible_attributes.begin(),
                                         settings.flexible_attributes.end());

    std::map<PairKey, std::vector<std::pair<const ClassificationRule*, SplitAntecedent>>> undesired_by_key;
    for (const auto& rule : undesired_rules) {
        if (rule.consequent.value != settings.undesired_state) continue;
        auto split = split_antecedent(rule, stable, flexible);
        if (split.key.stable.size() < settings.min_stable) continue;
        if (split.key.flexible.size() < settings.min_flexible) continue;
        auto key = split.key;
        undesired_by_key[std::move(key)].emplace_back(&rule, std::move(split));
    }

    std::vector<ActionRule> out;
    for (const auto& rule_d : desired_rules) {
        if (rule_d.consequent.value != settings.desired_state) continue;
        const auto split_d = split_antecedent(rule_d, stable, flexible);
        const auto group = undesired_by_key.find(split_d.key);
        if (group == undesired_by_key.end()) continue;
        for (const auto& [rule_u, split_u] : group->second) {
            ActionRule ar;
            ar.stable_conditions = split_d.key.stable;
            for (const auto& attr : split_d.key.flexible) {
                ar.actions.push_back({attr, split_u.flexible_values.at(attr), split_d.flexible_values.at(attr)});
            }
            if (ar.changed_count() < settings.min_flexible) continue;
            ar.undesired_rule = *rule_u;
            ar.desired_rule = rule_d;
            ar.target = settings.target;
            ar.undesired_state = settings.undesired_state;
            ar.desired_state = settings.desired_state;
            ar.uplift = compute_uplift(*rule_u, rule_d, dataset_size);
            if (ar.uplift < 0.0 && !settings.keep_negative_uplift) continue;
            out.push_back(std::move(ar));
        }
    }
    sort_rules(out);
    return out;
}

std::vector<ActionRule> reduce_dominant(std::span<const ActionRule> rules) {
    std::vector<std::set<std::string>> constraints;
    constraints.reserve(rules.size());
    for (const auto& r : rules) constraints.push_back(constraint_set(r));

    std::vector<ActionRule> out;
    for (std::size_t b = 0; b < rules.size(); ++b) {
        bool dominated = false;
        for (std::size_t a = 0; a < rules.size() && !dominated; ++a) {
            dominated = a != b && rules[a].uplift >= rules[b].uplift &&
                        strict_subset(constraints[a], constraints[b]);
        }
        if (!dominated) out.push_back(rules[b]);
    }
    sort_rules(out);
    return out;
}

RuleReport mine_action_rules(std::span<const Itemset> transactions, const MiningSettings& settings) {
    settings.validate();
    RuleReport report;
    report.settings = settings;
    report.dominance_applied = settings.reduce_dominant;

    // |D|: transactions carrying any target value.
    std::vector<Itemset> mined;
    for (const auto& t : transactions) {
        if (std::any_of(t.begin(), t.end(), [&](const Item& i) { return i.attribute == settings.target; })) {
            mined.push_back(t);
        }
    }
    report.dataset_size = mined.size();
    if (mined.empty()) return report;

    std::vector<std::string> attributes = settings.stable_attributes;
    attributes.insert(attributes.end(), settings.flexible_attributes.begin(), settings.flexible_attributes.end());
    const detail::TransactionIndex index(mined, attributes);
    const Item undesired_item{settings.target, settings.undesired_state};
    const Item desired_item{settings.target, settings.desired_state};
    const auto undesired_tids = index.tids_of(undesired_item);
    const auto desired_tids = index.tids_of(desired_item);
    const auto& entries = index.entries();

    // One pass serves both rule sides: a candidate survives while either
    // side can still reach its support threshold.
    std::vector<ClassificationRule> undesired_rules;
    std::vector<ClassificationRule> desired_rules;
    detail::levelwise(
        index,
        [&](const detail::TidSet& tids) {
            return tids.count_and(undesired_tids) >= settings.min_undesired_support ||
                   tids.count_and(desired_tids) >= settings.min_desired_support;
        },
        [&](const detail::ItemIds& ids, const detail::TidSet& tids) {
            const auto cover = tids.count();
            Itemset antecedent;
            for (auto id : ids) antecedent.push_back({attributes[entries[id].attribute], entries[id].value});
            std::sort(antecedent.begin(), antecedent.end());
            auto emit = [&](const Item& target, std::size_t support, std::size_t min_support,
                            double min_conf, std::vector<ClassificationRule>& sink) {
                if (support < min_support) return;
                const double conf = static_cast<double>(support) / static_cast<double>(cover);
                if (conf < min_conf) return;
                sink.push_back({antecedent, target, support, cover, conf});
            };
            emit(undesired_item, tids.count_and(undesired_tids), settings.min_undesired_support,
                 settings.min_undesired_confidence, undesired_rules);
            emit(desired_item, tids.count_and(desired_tids), settings.min_desired_support,
                 settings.min_desired_confidence, desired_rules);
        });

    report.discovered = pair_action_rules(undesired_rules, desired_rules, settings, report.dataset_size);
    if (settings.reduce_dominant) report.dominant = reduce_dominant(report.discovered);
    return report;
}

RuleReport mine_action_rules(const AugmentedTable& table, const MiningSettings& settings) {
    settings.validate();
    if (!table.has_column(settings.target)) {
        throw SchemaError("target column '" + settings.target + "' not in table");
    }
    const auto& target = table.column(settings.target);
    for (const auto& state : {settings.undesired_state, settings.desired_state}) {
        if (!target.category_index(state)) {
            throw SchemaError("target '" + settings.target + "' has no state '" + state + "'");
        }
    }
    std::vector<std::string> attributes = settings.stable_attributes;
    attributes.insert(attributes.end(), settings.flexible_attributes.begin(), settings.flexible_attributes.end());
    const auto transactions = to_transactions(table.with_target(settings.target), attributes);
    return mine_action_rules(transactions, settings);
}

}  // namespace textfeat

#include "textfeat/error.hpp"
#include "textfeat/generation.hpp"
#include "textfeat/text.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <unordered_map>

namespace textfeat {

namespace {

using Answers = std::map<std::string, std::optional<std::string>>;

std::optional<std::string> answer_text(const Json& value) {
    if (value.is_null()) return std::nullopt;
    if (value.is_string()) return value.get<std::string>();
    return value.dump();
}

// Flat {"name": value} or {"features": [{"feature_name": .., "answer": ..}]}.
std::optional<Answers> parse_answers(const std::string& content) {
    const auto object = extract_first_json_object(content);
    if (!object) return std::nullopt;
    Json doc;
    try {
        doc = Json::parse(*object);
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
    if (!doc.is_object()) return std::nullopt;
    Answers answers;
    if (doc.contains("features") && doc["features"].is_array()) {
        for (const auto& entry : doc["features"]) {
            if (!entry.is_object() || !entry.contains("feature_name") || !entry["feature_name"].is_string()) {
                continue;
            }
            answers[entry["feature_name"].get<std::string>()] =
                entry.contains("answer") ? answer_text(entry["answer"]) : std::nullopt;
        }
        return answers;
    }
    for (const auto& [key, value] : doc.items()) answers[key] = answer_text(value);
    return answers;
}

std::string normalized(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : text::trim(s)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

struct RowState {
    Answers answers;
    std::optional<std::string> failure;  // reason the row has no usable response
};

}  // namespace

Json GenerationReport::to_json() const {
    Json doc;
    doc["rows_total"] = rows_total;
    doc["rows_valid"] = rows_valid;
    doc["rows_invalid"] = rows_invalid;
    doc["values_coerced"] = values_coerced;
    Json details = Json::array();
    for (const auto& d : invalid_details) {
        Json entry;
        entry["row_id"] = d.row_id;
        entry["feature"] = d.feature;
        entry["value"] = d.value;
        details.push_back(std::move(entry));
    }
    doc["invalid_details"] = std::move(details);
    return doc;
}

AttachResult validate_and_attach(std::span<const LlmResponse> responses,
                                 std::span<const FeatureSpec> specs, const AugmentedTable& table,
                                 ValuePolicy policy) {
    if (specs.empty()) throw ValidationError("no feature specs to attach");
    for (const auto& spec : specs) {
        if (table.has_column(spec.column_name())) {
            throw SchemaError("table already has a column named '" + spec.column_name() + "'");
        }
    }

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < table.n_rows(); ++r) index.emplace(table.row_ids()[r], r);

    std::vector<RowState> rows(table.n_rows());
    std::vector<bool> seen(table.n_rows(), false);
    for (const auto& resp : responses) {
        const auto [row_id, prompt_id] = split_custom_id(resp.custom_id);
        const auto it = index.find(row_id);
        if (it == index.end()) {
            throw ValidationError("response '" + resp.custom_id + "' refers to unknown row '" + row_id + "'");
        }
        auto& state = rows[it->second];
        seen[it->second] = true;
        if (resp.status != ResponseStatus::Ok) {
            state.failure = "<" + std::string(to_string(resp.status)) + ">";
            continue;
        }
        const auto answers = parse_answers(resp.content);
        if (!answers) {
            state.failure = "<unparseable>";
            continue;
        }
        for (const auto& [key, value] : *answers) state.answers[key] = value;
    }

    GenerationReport report;
    report.rows_total = table.n_rows();
    std::vector<std::vector<Cell>> cells(specs.size(), std::vector<Cell>(table.n_rows()));
    std::vector<std::size_t> kept;

    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const auto& row_id = table.row_ids()[r];
        auto& state = rows[r];
        if (!seen[r]) state.failure = "<no response>";
        if (state.failure) {
            report.invalid_details.push_back({row_id, "*", *state.failure});
            continue;
        }
        bool valid = true;
        for (std::size_t f = 0; f < specs.size(); ++f) {
            const auto& spec = specs[f];
            auto found = state.answers.find(spec.feature_name);
            if (found == state.answers.end()) found = state.answers.find(spec.column_name());
            const std::optional<std::string> answer =
                found == state.answers.end() ? std::nullopt : found->second;

            if (!answer || text::trim(*answer).empty()) {
                if (policy == ValuePolicy::Strict) {
                    report.invalid_details.push_back({row_id, spec.feature_name, "<missing>"});
                    valid = false;
                }
                continue;
            }
            if (!spec.categorical()) {
                cells[f][r] = std::string(text::trim(*answer));
                continue;
            }
            const auto& allowed = spec.possible_values;
            if (std::find(allowed.begin(), allowed.end(), *answer) != allowed.end()) {
                cells[f][r] = *answer;
                continue;
            }
            if (policy == ValuePolicy::Strict) {
                report.invalid_details.push_back({row_id, spec.feature_name, *answer});
                valid = false;
                continue;
            }
            const auto key = normalized(*answer);
            const auto match = std::find_if(allowed.begin(), allowed.end(),
                                            [&](const std::string& v) { return normalized(v) == key; });
            ++report.values_coerced;
            if (match != allowed.end()) {
                cells[f][r] = *match;
            } else if (spec.other_fallback) {
                cells[f][r] = "Other";
            }
        }
        if (valid) kept.push_back(r);
    }
    report.rows_valid = kept.size();
    report.rows_invalid = report.rows_total - report.rows_valid;

    {
        std::vector<bool> keep(table.n_rows(), false);
        for (auto r : kept) keep[r] = true;
        for (auto& column : cells) {
            for (std::size_t r = 0; r < column.size(); ++r) {
                if (!keep[r]) column[r].reset();
            }
        }
    }

    AugmentedTable out = table;
    for (std::size_t f = 0; f < specs.size(); ++f) {
        const auto& spec = specs[f];
        std::vector<std::string> categories = spec.possible_values;
        if (!spec.categorical()) {
            std::set<std::string> observed;
            for (auto r : kept) {
                if (cells[f][r]) observed.insert(*cells[f][r]);
            }
            categories.assign(observed.begin(), observed.end());
        }
        const auto kind = categories.size() == 2 ? ColumnKind::Binary : ColumnKind::Categorical;
        out = out.with_column(Column(spec.column_name(), kind, std::move(cells[f]), std::move(categories)));
    }
    return {out.select_rows(kept), std::move(report)};
}

}  // namespace textfeat

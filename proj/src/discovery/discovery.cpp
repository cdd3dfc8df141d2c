#include "textfeat/discovery.hpp"

#include "textfeat/error.hpp"
#include "textfeat/rng.hpp"
#include "textfeat/table.hpp"
#include "textfeat/text.hpp"

#include <cctype>
#include <map>
#include <numeric>
#include <set>

namespace textfeat {

namespace {

const std::set<std::string, std::less<>> kPlaceholders = {"name", "description", "target",
                                                          "examples"};

// JSON string body without the surrounding quotes.
std::string json_escape(std::string_view value) {
    const std::string quoted = Json(std::string(value)).dump();
    return quoted.substr(1, quoted.size() - 2);
}

bool is_ident(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string require_string(const Json& entry, const char* key, std::size_t index) {
    const auto it = entry.find(key);
    if (it == entry.end()) {
        throw ValidationError("feature " + std::to_string(index) + ": missing required key '" + key + "'");
    }
    if (!it->is_string()) {
        throw ValidationError("feature " + std::to_string(index) + ": key '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

}  // namespace

std::string FeatureSpec::column_name() const { return to_snake_case(feature_name); }

DiscoveryPrompt build_discovery_prompt(const DatasetMeta& meta, std::size_t sample_size,
                                       std::uint64_t seed, std::string_view template_text) {
    if (sample_size == 0) throw SettingsError("discovery prompt needs at least one example row");
    if (sample_size > meta.example_rows.size()) {
        throw SettingsError("sample size " + std::to_string(sample_size) + " exceeds the " +
                            std::to_string(meta.example_rows.size()) + " available rows");
    }

    std::vector<std::size_t> order(meta.example_rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    // Partial Fisher-Yates: the first sample_size slots are the draw.
    for (std::size_t i = 0; i < sample_size; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
        std::swap(order[i], order[j]);
    }
    order.resize(sample_size);

    const std::string text_label = meta.text_column.empty() ? "text" : meta.text_column;
    const std::string target_label = meta.target_column.empty() ? "target" : meta.target_column;
    std::string examples;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& row = meta.example_rows[order[i]];
        if (i) examples += '\n';
        examples += text_label + ": " + row.text + " | " + target_label + ": " + row.target;
    }
    std::string target = target_label;
    if (!meta.target_definition.empty()) target += ": " + meta.target_definition;

    const std::map<std::string, std::string, std::less<>> values = {
        {"name", json_escape(meta.name)},
        {"description", json_escape(meta.description)},
        {"target", json_escape(target)},
        {"examples", json_escape(examples)},
    };

    std::string body;
    body.reserve(template_text.size() + examples.size() * 2);
    for (std::size_t i = 0; i < template_text.size();) {
        if (template_text[i] == '$' && i + 1 < template_text.size() && is_ident(template_text[i + 1])) {
            std::size_t j = i + 1;
            while (j < template_text.size() && is_ident(template_text[j])) ++j;
            const auto key = template_text.substr(i + 1, j - i - 1);
            const auto it = values.find(key);
            if (it == values.end()) {
                throw TemplateError("discovery template has unsubstituted placeholder '$" +
                                    std::string(key) + "'");
            }
            body += it->second;
            i = j;
        } else {
            body += template_text[i++];
        }
    }

    DiscoveryPrompt prompt;
    prompt.body = std::move(body);
    prompt.sample_count = sample_size;
    prompt.sampled_rows = std::move(order);
    if (Json::accept(prompt.body)) {
        const auto parsed = Json::parse(prompt.body);
        if (parsed.is_object() && parsed.contains("system_message") &&
            parsed["system_message"].is_string()) {
            prompt.system_message = parsed["system_message"].get<std::string>();
        }
    }
    return prompt;
}

std::vector<std::string> options_from_query(std::string_view query) {
    std::vector<std::string> out;
    const auto pos = query.find("Options:");
    if (pos == std::string_view::npos) return out;
    auto rest = query.substr(pos + 8);
    // Values are single-quoted; an apostrophe inside a value is followed by a
    // letter, a closing quote is not.
    std::size_t i = 0;
    while (i < rest.size()) {
        const auto open = rest.find('\'', i);
        if (open == std::string_view::npos) break;
        std::size_t close = open + 1;
        while (close < rest.size()) {
            if (rest[close] == '\'' &&
                (close + 1 == rest.size() || !std::isalpha(static_cast<unsigned char>(rest[close + 1])))) {
                break;
            }
            ++close;
        }
        if (close >= rest.size()) break;
        out.emplace_back(rest.substr(open + 1, close - open - 1));
        i = close + 1;
    }
    return out;
}

std::vector<FeatureSpec> parse_feature_specs(std::string_view raw) {
    const std::string body = strip_markdown_fences(raw);
    const Json doc = parse_json(body, "feature specification");
    const Json* list = nullptr;
    if (doc.is_object() && doc.contains("features")) {
        list = &doc["features"];
    } else if (doc.is_object() && doc.contains("output_format")) {
        throw ValidationError("input looks like a prompt, not a feature list");
    }
    if (!list || !list->is_array()) throw ValidationError("expected an object with a 'features' array");
    if (list->empty()) throw ValidationError("feature list is empty");

    std::vector<FeatureSpec> specs;
    std::set<std::string> names;
    std::set<std::string> columns;
    for (std::size_t i = 0; i < list->size(); ++i) {
        const auto& entry = (*list)[i];
        if (!entry.is_object()) throw ValidationError("feature " + std::to_string(i) + " is not an object");
        FeatureSpec spec;
        spec.feature_name = std::string(text::trim(require_string(entry, "feature_name", i)));
        spec.description = require_string(entry, "description", i);
        spec.extraction_query = require_string(entry, "extraction_query", i);
        if (spec.feature_name.empty()) {
            throw ValidationError("feature " + std::to_string(i) + ": empty feature_name");
        }
        if (text::trim(spec.extraction_query).empty()) {
            throw ValidationError("feature " + std::to_string(i) + ": empty extraction_query");
        }
        if (const auto it = entry.find("possible_values"); it != entry.end()) {
            if (!it->is_array()) {
                throw ValidationError("feature " + std::to_string(i) + ": possible_values must be a list");
            }
            std::set<std::string> seen;
            for (const auto& v : *it) {
                std::string value = v.is_string() ? v.get<std::string>() : v.dump();
                if (seen.insert(value).second) spec.possible_values.push_back(std::move(value));
            }
            if (spec.possible_values.empty()) {
                throw ValidationError("feature " + std::to_string(i) + ": possible_values is empty");
            }
        } else {
            spec.possible_values = options_from_query(spec.extraction_query);
        }
        spec.other_fallback = std::find(spec.possible_values.begin(), spec.possible_values.end(),
                                        "Other") != spec.possible_values.end();
        if (!names.insert(spec.feature_name).second) {
            throw ValidationError("feature " + std::to_string(i) + ": duplicate feature_name '" +
                                  spec.feature_name + "'");
        }
        if (!columns.insert(spec.column_name()).second) {
            throw ValidationError("feature " + std::to_string(i) + ": '" + spec.feature_name +
                                  "' collides with another feature after snake_case normalization");
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

Json feature_specs_to_json(const std::vector<FeatureSpec>& specs) {
    Json features = Json::array();
    for (const auto& s : specs) {
        Json entry;
        entry["feature_name"] = s.feature_name;
        entry["description"] = s.description;
        if (s.categorical()) entry["possible_values"] = s.possible_values;
        entry["extraction_query"] = s.extraction_query;
        features.push_back(std::move(entry));
    }
    Json doc;
    doc["features"] = std::move(features);
    return doc;
}

std::string serialize_feature_specs(const std::vector<FeatureSpec>& specs) {
    return feature_specs_to_json(specs).dump(2) + "\n";
}

FeatureSpec cap_categories(FeatureSpec spec, std::size_t max_categories) {
    if (spec.possible_values.size() <= max_categories) return spec;
    spec.possible_values.resize(max_categories);
    if (std::find(spec.possible_values.begin(), spec.possible_values.end(), "Other") ==
        spec.possible_values.end()) {
        spec.possible_values.push_back("Other");
    }
    spec.other_fallback = true;
    return spec;
}

}  // namespace textfeat

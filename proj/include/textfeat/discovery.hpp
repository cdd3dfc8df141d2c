#pragma once

#include "textfeat/json_util.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace textfeat {

struct ExampleRow {
    std::string text;
    std::string target;
};

struct DatasetMeta {
    std::string name;
    std::string description;
    std::string text_column;
    std::string target_column;
    std::string target_definition;
    std::vector<ExampleRow> example_rows;  // candidate pool; a seeded subset goes in the prompt
};

// A discovered feature. An empty `possible_values` marks a free-form feature
// (dates, codes) whose answers are taken verbatim.
struct FeatureSpec {
    std::string feature_name;
    std::string description;
    std::vector<std::string> possible_values;
    std::string extraction_query;
    bool other_fallback = false;  // an "Other" bucket absorbs unlisted answers

    bool categorical() const { return !possible_values.empty(); }
    std::string column_name() const;
};

struct DiscoveryPrompt {
    std::string system_message;
    std::string body;
    std::size_t sample_count = 0;
    std::vector<std::size_t> sampled_rows;  // indices into DatasetMeta::example_rows
};

std::string_view default_discovery_template();

// Substitutes $name, $description, $target and $examples into the template.
// Values are JSON-string escaped because every placeholder sits inside a
// JSON string. Any other $placeholder in the template is a TemplateError.
DiscoveryPrompt build_discovery_prompt(const DatasetMeta& meta, std::size_t sample_size,
                                       std::uint64_t seed,
                                       std::string_view template_text = default_discovery_template());

// Accepts the model's reply (fenced or not) holding {"features": [...]}.
// Entries without possible_values take them from the quoted list after
// "Options:" in the extraction query.
std::vector<FeatureSpec> parse_feature_specs(std::string_view raw);

Json feature_specs_to_json(const std::vector<FeatureSpec>& specs);
std::string serialize_feature_specs(const std::vector<FeatureSpec>& specs);

// Keeps the first `max_categories` listed values and appends "Other".
FeatureSpec cap_categories(FeatureSpec spec, std::size_t max_categories = 15);

// Quoted values following "Options:" in an extraction query, in order.
std::vector<std::string> options_from_query(std::string_view query);

}  // namespace textfeat

#pragma once

#include "textfeat/discovery.hpp"
#include "textfeat/llm.hpp"
#include "textfeat/table.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace textfeat {

// A hand-written feature for the one-prompt-per-feature workflow.
struct UserFeature {
    std::string name;        // answer key, e.g. "rigor"
    std::string subject;     // "methodological rigor of the research"
    std::string definition;  // one or two sentences defining the subject
    std::vector<std::string> values;
    std::string choices;  // text after "You will choose between"; derived from values if empty
    bool ordinal = false;
    std::string item_noun = "research paper";
    std::string text_noun = "abstract";

    FeatureSpec to_spec() const;
};

struct ExtractionPrompt {
    std::vector<std::string> feature_names;
    std::string body;
    std::string row_id;
    std::string prompt_id;
    std::map<std::string, std::vector<std::string>> expected_schema;

    std::string custom_id() const { return row_id + "::" + prompt_id; }
};

ExtractionPrompt build_single_feature_prompt(const UserFeature& feature, std::string_view text,
                                             std::string row_id = "0");
ExtractionPrompt build_multi_feature_prompt(std::span<const FeatureSpec> specs, std::string_view text,
                                            std::string row_id = "0");

struct ModelSettings {
    std::string model = "gpt-4o-mini-2024-07-18";
    double temperature = 0.0;
    double top_p = 0.9;
    bool deterministic = false;
};

LlmRequest make_request(const ExtractionPrompt& prompt, const ModelSettings& settings,
                        std::string_view system_message = {});

// Splits "ROW::PROMPT" at the last "::".
std::pair<std::string, std::string> split_custom_id(std::string_view custom_id);

enum class ValuePolicy { Strict, Coerce };

struct InvalidDetail {
    std::string row_id;
    std::string feature;
    std::string value;
};

struct GenerationReport {
    std::size_t rows_total = 0;
    std::size_t rows_valid = 0;
    std::size_t rows_invalid = 0;
    std::size_t values_coerced = 0;
    std::vector<InvalidDetail> invalid_details;

    Json to_json() const;
};

struct AttachResult {
    AugmentedTable table;
    GenerationReport report;
};

// Parses each response (first balanced JSON object, fences stripped), reads
// flat {"name": value} answers or {"features": [{"feature_name", "answer"}]},
// and appends one column per spec. Under Strict any out-of-space or missing
// answer invalidates the row; under Coerce answers are matched ignoring case
// and surrounding whitespace, and unmatched answers become "Other" when the
// spec has that bucket, else missing. Rows without a usable response are
// invalid under both policies. Invalid rows are dropped from the result.
AttachResult validate_and_attach(std::span<const LlmResponse> responses,
                                 std::span<const FeatureSpec> specs, const AugmentedTable& table,
                                 ValuePolicy policy);

}  // namespace textfeat

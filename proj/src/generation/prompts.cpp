#include "textfeat/error.hpp"
#include "textfeat/generation.hpp"
#include "textfeat/text.hpp"

#include <cctype>
#include <set>

namespace textfeat {

namespace {

std::string capitalized(std::string_view s) {
    std::string out(s);
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

std::string default_choices(const std::vector<std::string>& values) {
    return "the following values: " + text::join(values, ", ") + ".";
}

}  // namespace

FeatureSpec UserFeature::to_spec() const {
    FeatureSpec spec;
    spec.feature_name = name;
    spec.description = definition;
    spec.possible_values = values;
    spec.extraction_query = "Assess the " + subject + ". You will choose between " +
                            (choices.empty() ? default_choices(values) : choices);
    return spec;
}

ExtractionPrompt build_single_feature_prompt(const UserFeature& feature, std::string_view text_body,
                                             std::string row_id) {
    if (text::trim(text_body).empty()) throw ValidationError("cannot build a prompt for empty text");
    if (feature.name.empty()) throw ValidationError("user feature has no name");
    if (feature.values.empty()) {
        throw ValidationError("user feature '" + feature.name + "' has no values");
    }

    std::string body;
    body += "You are a categorization assistant. Your job will be to assign a certain characteristic to a " +
            feature.item_noun + " based on its " + feature.text_noun + ".\n\n";
    body += "In this instance you will assess the " + feature.subject + ".\n\n";
    if (!feature.definition.empty()) body += feature.definition + "\n\n";
    body += "You will choose between " +
            (feature.choices.empty() ? default_choices(feature.values) : feature.choices) + "\n\n";
    body +=
        "Be concise, no explanation is to be provided. Your answer will consist of an answer in "
        "plain json format and nothing else like so:\n\n";
    body += "{\n    \"" + feature.name + "\": \"value\"\n}\n\n";
    body += capitalized(feature.text_noun) + " to be evaluated:\n";
    body += std::string(text_body);

    ExtractionPrompt prompt;
    prompt.feature_names = {feature.name};
    prompt.body = std::move(body);
    prompt.row_id = std::move(row_id);
    prompt.prompt_id = feature.name;
    prompt.expected_schema[feature.name] = feature.values;
    return prompt;
}

ExtractionPrompt build_multi_feature_prompt(std::span<const FeatureSpec> specs, std::string_view text_body,
                                            std::string row_id) {
    if (specs.empty()) throw ValidationError("multi-feature prompt needs at least one feature");
    std::set<std::string> names;
    for (const auto& s : specs) {
        if (!names.insert(s.feature_name).second) {
            throw ValidationError("duplicate feature '" + s.feature_name + "' in prompt");
        }
    }

    Json doc;
    doc["input_text"] = std::string(text_body);
    doc["task"] = "Extract the following features as described below and return a valid JSON object.";
    doc["constraints"] = Json::array({"The output must be a valid JSON.",
                                      "All answers must be simple and correspond to categorical values only."});
    Json features = Json::array();
    ExtractionPrompt prompt;
    for (const auto& s : specs) {
        Json entry;
        entry["feature_name"] = s.feature_name;
        entry["description"] = s.description;
        entry["extraction_query"] = s.extraction_query;
        features.push_back(std::move(entry));
        prompt.feature_names.push_back(s.feature_name);
        prompt.expected_schema[s.feature_name] = s.possible_values;
    }
    doc["features"] = std::move(features);
    Json answer_shape;
    answer_shape["feature_name"] = "<Feature Name>";
    answer_shape["answer"] = "<Extracted Answer>";
    Json structure;
    structure["features"] = Json::array({answer_shape});
    Json output_format;
    output_format["type"] = "json";
    output_format["structure"] = std::move(structure);
    doc["output_format"] = std::move(output_format);

    prompt.body = doc.dump(2);
    prompt.row_id = std::move(row_id);
    prompt.prompt_id = "features";
    return prompt;
}

LlmRequest make_request(const ExtractionPrompt& prompt, const ModelSettings& settings,
                        std::string_view system_message) {
    LlmRequest req;
    req.custom_id = prompt.custom_id();
    req.model = settings.model;
    req.deterministic = settings.deterministic;
    req.temperature = settings.deterministic ? 0.0 : settings.temperature;
    req.top_p = settings.top_p;
    if (!system_message.empty()) req.messages.push_back({"system", std::string(system_message)});
    req.messages.push_back({"user", prompt.body});
    return req;
}

std::pair<std::string, std::string> split_custom_id(std::string_view custom_id) {
    const auto pos = custom_id.rfind("::");
    if (pos == std::string_view::npos) return {std::string(custom_id), std::string()};
    return {std::string(custom_id.substr(0, pos)), std::string(custom_id.substr(pos + 2))};
}

}  // namespace textfeat

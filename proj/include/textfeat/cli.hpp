#pragma once

#include "textfeat/discovery.hpp"
#include "textfeat/generation.hpp"
#include "textfeat/json_util.hpp"
#include "textfeat/rules.hpp"
#include "textfeat/stats.hpp"
#include "textfeat/table.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace textfeat {

struct DatasetConfig {
    std::string name;
    std::string description;
    std::string text_column = "text";
    std::string target_column = "target";
    std::string target_definition;
    std::string id_column = "row_id";
    std::map<std::string, ColumnHint, std::less<>> columns;
};

struct BackendConfig {
    std::string mode = "mock";  // live | mock | batch-emit | batch-ingest
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key;
    std::string api_key_env = "OPENAI_API_KEY";
    ModelSettings model;
    std::string system_message;
    std::size_t parallelism = 4;
    int max_attempts = 3;
    int timeout_seconds = 120;
    std::filesystem::path mock_fixture;
    std::filesystem::path batch_dir = "batches";
    std::size_t batch_cap = kDefaultBatchCap;
};

struct DiscoveryConfig {
    std::size_t sample_size = 40;
    std::uint64_t seed = 0;
    std::filesystem::path template_path;  // empty: built-in template
    std::size_t max_categories = 15;
    std::size_t expected_features = 20;   // fewer discovered features is warned about
};

struct GenerationConfig {
    std::string workflow = "auto";  // auto | user
    ValuePolicy policy = ValuePolicy::Strict;
    std::vector<UserFeature> user_features;
};

struct CorrelationCheck {
    std::string feature;
    std::string measure = "smog";  // smog, or another column name
};

struct ValidationConfig {
    BootstrapOptions bootstrap;
    double robust_fraction = 0.95;
    CorrelationMethod correlation = CorrelationMethod::Pearson;
    std::vector<std::string> features;  // empty: every categorical column
    std::vector<CorrelationCheck> correlations;
};

struct Experiment {
    std::string id;
    MiningSettings settings;
    std::optional<TargetBinning> binning;
};

struct EvaluationConfig {
    std::string representation = "llm";
    std::string classifier = "nb";
    std::size_t tfidf_min_df = 1;
    std::uint64_t seed = 0;
};

struct PipelineConfig {
    DatasetConfig dataset;
    BackendConfig backend;
    DiscoveryConfig discovery;
    GenerationConfig generation;
    SplitSpec split;
    ValidationConfig validation;
    std::vector<Experiment> experiments;
    EvaluationConfig evaluation;
    Json snapshot;  // effective config, secrets removed

    const Experiment& experiment(const std::string& id) const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

// Relative paths resolve against `base_dir`. TEXTFEAT_API_KEY (or the
// variable named by llm.api_key_env), TEXTFEAT_ENDPOINT and TEXTFEAT_MODEL
// override the file.
PipelineConfig parse_config(const Json& doc, const std::filesystem::path& base_dir,
                            const EnvLookup& env = process_env);
PipelineConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env);

std::string fnv1a_hex(std::string_view bytes);

// Exit codes: 0 success, 1 user or config error, 2 data error, 3 backend.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace textfeat

#include "textfeat/cli.hpp"
#include "textfeat/error.hpp"

#include <cstdio>
#include <cstdlib>

namespace textfeat {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

template <typename T>
void read(const Json& doc, const char* key, T& into) {
    if (doc.contains(key) && !doc[key].is_null()) into = doc[key].get<T>();
}

ValuePolicy policy_from(const std::string& s) {
    if (s == "strict") return ValuePolicy::Strict;
    if (s == "coerce") return ValuePolicy::Coerce;
    throw ConfigError("unknown value policy '" + s + "' (strict|coerce)");
}

CorrelationMethod correlation_from(const std::string& s) {
    if (s == "pearson") return CorrelationMethod::Pearson;
    if (s == "spearman") return CorrelationMethod::Spearman;
    throw ConfigError("unknown correlation method '" + s + "' (pearson|spearman)");
}

DatasetConfig parse_dataset(const Json& doc) {
    DatasetConfig d;
    read(doc, "name", d.name);
    read(doc, "description", d.description);
    read(doc, "text_column", d.text_column);
    read(doc, "target_column", d.target_column);
    read(doc, "target_definition", d.target_definition);
    read(doc, "id_column", d.id_column);
    if (doc.contains("columns")) {
        for (const auto& [name, hint] : doc["columns"].items()) {
            ColumnHint h;
            h.kind = column_kind_from_string(hint.value("kind", std::string("categorical")));
            read(hint, "categories", h.categories);
            d.columns[name] = std::move(h);
        }
    }
    return d;
}

BackendConfig parse_backend(const Json& doc, const std::filesystem::path& base) {
    BackendConfig b;
    read(doc, "mode", b.mode);
    read(doc, "endpoint", b.endpoint);
    read(doc, "api_key", b.api_key);
    read(doc, "api_key_env", b.api_key_env);
    read(doc, "model", b.model.model);
    read(doc, "temperature", b.model.temperature);
    read(doc, "top_p", b.model.top_p);
    read(doc, "deterministic", b.model.deterministic);
    read(doc, "system_message", b.system_message);
    read(doc, "parallelism", b.parallelism);
    read(doc, "max_attempts", b.max_attempts);
    read(doc, "timeout_seconds", b.timeout_seconds);
    read(doc, "batch_cap", b.batch_cap);
    std::string fixture, batch_dir;
    read(doc, "mock_fixture", fixture);
    read(doc, "batch_dir", batch_dir);
    b.mock_fixture = resolve(base, fixture);
    if (!batch_dir.empty()) b.batch_dir = resolve(base, batch_dir);
    return b;
}

UserFeature parse_user_feature(const Json& doc) {
    UserFeature f;
    f.name = doc.at("name").get<std::string>();
    read(doc, "subject", f.subject);
    read(doc, "definition", f.definition);
    read(doc, "values", f.values);
    read(doc, "choices", f.choices);
    read(doc, "ordinal", f.ordinal);
    read(doc, "item_noun", f.item_noun);
    read(doc, "text_noun", f.text_noun);
    if (f.values.empty()) throw ConfigError("user feature '" + f.name + "' has no values");
    return f;
}

TargetBinning parse_binning(const Json& doc) {
    TargetBinning b;
    read(doc, "output_column", b.output_column);
    for (const auto& [label, cats] : doc.at("bins").items()) {
        std::vector<std::string> values;
        for (const auto& c : cats) values.push_back(c.is_string() ? c.get<std::string>() : c.dump());
        b.bins.emplace_back(label, std::move(values));
    }
    return b;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

const Experiment& PipelineConfig::experiment(const std::string& id) const {
    for (const auto& e : experiments) {
        if (e.id == id) return e;
    }
    throw ConfigError("no experiment with id '" + id + "' in config");
}

PipelineConfig parse_config(const Json& doc, const std::filesystem::path& base_dir, const EnvLookup& env) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    PipelineConfig cfg;
    try {
        if (doc.contains("dataset")) cfg.dataset = parse_dataset(doc["dataset"]);
        if (doc.contains("llm")) cfg.backend = parse_backend(doc["llm"], base_dir);
        if (doc.contains("discovery")) {
            const auto& d = doc["discovery"];
            read(d, "sample_size", cfg.discovery.sample_size);
            read(d, "seed", cfg.discovery.seed);
            read(d, "max_categories", cfg.discovery.max_categories);
            read(d, "expected_features", cfg.discovery.expected_features);
            std::string tmpl;
            read(d, "template", tmpl);
            cfg.discovery.template_path = resolve(base_dir, tmpl);
        }
        if (doc.contains("generation")) {
            const auto& g = doc["generation"];
            read(g, "workflow", cfg.generation.workflow);
            cfg.generation.policy = policy_from(g.value("policy", std::string("strict")));
            if (g.contains("user_features")) {
                for (const auto& f : g["user_features"]) cfg.generation.user_features.push_back(parse_user_feature(f));
            }
        }
        if (doc.contains("split")) {
            read(doc["split"], "train_fraction", cfg.split.train_fraction);
            read(doc["split"], "seed", cfg.split.seed);
        }
        if (doc.contains("validation")) {
            const auto& v = doc["validation"];
            read(v, "alpha", cfg.validation.bootstrap.alpha);
            read(v, "bootstrap_reps", cfg.validation.bootstrap.reps);
            read(v, "seed", cfg.validation.bootstrap.seed);
            read(v, "threads", cfg.validation.bootstrap.threads);
            read(v, "robust_fraction", cfg.validation.robust_fraction);
            read(v, "features", cfg.validation.features);
            cfg.validation.correlation = correlation_from(v.value("correlation", std::string("pearson")));
            if (v.contains("correlations")) {
                for (const auto& c : v["correlations"]) {
                    CorrelationCheck check;
                    check.feature = c.at("feature").get<std::string>();
                    read(c, "measure", check.measure);
                    cfg.validation.correlations.push_back(std::move(check));
                }
            }
        }
        if (doc.contains("experiments")) {
            for (const auto& e : doc["experiments"]) {
                Experiment ex;
                ex.id = e.at("id").is_string() ? e["id"].get<std::string>() : e["id"].dump();
                if (e.contains("binning")) ex.binning = parse_binning(e["binning"]);
                Json settings = e;
                if (!settings.contains("target")) settings["target"] = cfg.dataset.target_column;
                if (ex.binning && !e.contains("target")) {
                    settings["target"] = ex.binning->output_column.empty() ? cfg.dataset.target_column + "_bin"
                                                                           : ex.binning->output_column;
                }
                ex.settings = MiningSettings::from_json(settings);
                for (const auto& other : cfg.experiments) {
                    if (other.id == ex.id) throw ConfigError("experiment id '" + ex.id + "' repeated");
                }
                cfg.experiments.push_back(std::move(ex));
            }
        }
        if (doc.contains("evaluation")) {
            const auto& v = doc["evaluation"];
            read(v, "representation", cfg.evaluation.representation);
            read(v, "classifier", cfg.evaluation.classifier);
            read(v, "tfidf_min_df", cfg.evaluation.tfidf_min_df);
            read(v, "seed", cfg.evaluation.seed);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    auto& b = cfg.backend;
    if (b.mode != "live" && b.mode != "mock" && b.mode != "batch-emit" && b.mode != "batch-ingest") {
        throw ConfigError("llm.mode must be one of live, mock, batch-emit, batch-ingest");
    }
    if (auto key = env("TEXTFEAT_API_KEY")) {
        b.api_key = *key;
    } else if (auto named = env(b.api_key_env)) {
        b.api_key = *named;
    }
    if (auto endpoint = env("TEXTFEAT_ENDPOINT")) b.endpoint = *endpoint;
    if (auto model = env("TEXTFEAT_MODEL")) b.model.model = *model;
    if (b.model.deterministic) b.model.temperature = 0.0;

    cfg.snapshot = doc;
    if (cfg.snapshot.contains("llm")) {
        cfg.snapshot["llm"].erase("api_key");
        cfg.snapshot["llm"]["endpoint"] = b.endpoint;
        cfg.snapshot["llm"]["model"] = b.model.model;
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
    Json doc;
    try {
        doc = load_json_file(path.string());
    } catch (const ParseError& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path(), env);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace textfeat

#include "textfeat/cli.hpp"
#include "textfeat/error.hpp"
#include "textfeat/eval.hpp"
#include "textfeat/llm.hpp"
#include "textfeat/text.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#ifndef TEXTFEAT_VERSION
#define TEXTFEAT_VERSION "dev"
#endif

namespace textfeat {

namespace {

namespace fs = std::filesystem;

// Everything needed to reproduce a command: what went in, what came out,
// the effective configuration. No clocks, no absolute paths.
class Manifest {
public:
    explicit Manifest(std::string command) {
        doc_["command"] = std::move(command);
        doc_["version"] = TEXTFEAT_VERSION;
        doc_["inputs"] = Json::array();
        doc_["outputs"] = Json::array();
    }

    void input(const fs::path& path) { doc_["inputs"].push_back(entry(path)); }
    void output(const fs::path& path) { doc_["outputs"].push_back(entry(path)); }
    Json& operator[](const char* key) { return doc_[key]; }
    void write(const fs::path& path) const { save_json_file(path.string(), doc_); }

private:
    static Json entry(const fs::path& path) {
        Json e;
        e["file"] = path.filename().string();
        e["fnv1a"] = fnv1a_hex(text::read_file(path.string()));
        return e;
    }

    Json doc_;
};

fs::path manifest_path(const std::string& flag, const fs::path& primary) {
    if (!flag.empty()) return flag;
    return fs::path(primary.string() + ".manifest.json");
}

LoadOptions load_options(const PipelineConfig& cfg) {
    LoadOptions o;
    o.target = cfg.dataset.target_column;
    o.id_column = cfg.dataset.id_column;
    o.hints = cfg.dataset.columns;
    return o;
}

std::vector<std::string> texts_of(const AugmentedTable& table, const std::string& column) {
    if (!table.has_column(column)) throw SchemaError("text column '" + column + "' not in table");
    const auto& col = table.column(column);
    std::vector<std::string> out;
    for (std::size_t r = 0; r < col.size(); ++r) out.push_back(col.cell(r).value_or(""));
    return out;
}

std::unique_ptr<LlmBackend> make_backend(const PipelineConfig& cfg, const std::string& mode,
                                         const std::string& fixture_flag) {
    if (mode == "live") {
        HttpBackendConfig h;
        h.endpoint = cfg.backend.endpoint;
        h.api_key = cfg.backend.api_key;
        h.timeout = std::chrono::seconds(cfg.backend.timeout_seconds);
        return std::make_unique<HttpBackend>(std::move(h));
    }
    if (mode == "mock") {
        const fs::path fixture = fixture_flag.empty() ? cfg.backend.mock_fixture : fs::path(fixture_flag);
        if (fixture.empty()) throw ConfigError("mock mode needs llm.mock_fixture or --fixture");
        return std::make_unique<MockBackend>(MockBackend::read_fixtures(fixture));
    }
    throw ConfigError("mode '" + mode + "' does not use a backend");
}

SubmitOptions submit_options(const PipelineConfig& cfg) {
    SubmitOptions o;
    o.parallelism = cfg.backend.parallelism;
    o.max_attempts = cfg.backend.max_attempts;
    return o;
}

Json model_json(const ModelSettings& m) {
    Json doc;
    doc["model"] = m.model;
    doc["temperature"] = m.temperature;
    doc["top_p"] = m.top_p;
    doc["deterministic"] = m.deterministic;
    return doc;
}

// ---- discover ----------------------------------------------------------------

struct DiscoverArgs {
    std::string config, data, out = "features.json", manifest, mode, fixture;
    std::optional<std::size_t> sample_size;
    std::optional<std::uint64_t> seed;
};

int cmd_discover(const DiscoverArgs& a, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(a.config);
    const auto table = load_csv(a.data, load_options(cfg));
    const auto sample_size = a.sample_size.value_or(cfg.discovery.sample_size);
    const auto seed = a.seed.value_or(cfg.discovery.seed);
    const auto mode = a.mode.empty() ? cfg.backend.mode : a.mode;
    if (mode != "live" && mode != "mock") throw ConfigError("discover runs in live or mock mode only");

    DatasetMeta meta;
    meta.name = cfg.dataset.name;
    meta.description = cfg.dataset.description;
    meta.text_column = cfg.dataset.text_column;
    meta.target_column = cfg.dataset.target_column;
    meta.target_definition = cfg.dataset.target_definition;
    const auto texts = texts_of(table, cfg.dataset.text_column);
    const auto& target = table.target();
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        if (texts[r].empty() || !target.cell(r)) continue;
        meta.example_rows.push_back({texts[r], *target.cell(r)});
    }

    std::string tmpl(default_discovery_template());
    if (!cfg.discovery.template_path.empty()) tmpl = text::read_file(cfg.discovery.template_path.string());
    const auto prompt = build_discovery_prompt(meta, sample_size, seed, tmpl);

    LlmRequest req;
    req.custom_id = "discovery::features";
    req.model = cfg.backend.model.model;
    req.temperature = cfg.backend.model.temperature;
    req.top_p = cfg.backend.model.top_p;
    req.deterministic = cfg.backend.model.deterministic;
    if (!prompt.system_message.empty()) req.messages.push_back({"system", prompt.system_message});
    req.messages.push_back({"user", prompt.body});

    auto backend = make_backend(cfg, mode, a.fixture);
    const std::vector<LlmRequest> requests{req};
    const auto responses = submit(requests, *backend, submit_options(cfg));
    const auto& resp = responses.front();
    if (resp.status != ResponseStatus::Ok) {
        throw BackendError("discovery request failed (" + std::string(to_string(resp.status)) + "): " + resp.error);
    }
    auto specs = parse_feature_specs(resp.content);
    for (auto& spec : specs) {
        if (spec.possible_values.size() > cfg.discovery.max_categories) {
            err << "warning: feature '" << spec.feature_name << "' capped at " << cfg.discovery.max_categories
                << " categories plus Other\n";
            spec = cap_categories(std::move(spec), cfg.discovery.max_categories);
        }
    }
    if (specs.size() < cfg.discovery.expected_features) {
        err << "warning: " << specs.size() << " features discovered, expected " << cfg.discovery.expected_features
            << "\n";
    }
    text::write_file(a.out, serialize_feature_specs(specs));

    Manifest m("discover");
    m.input(a.config);
    m.input(a.data);
    m["config"] = cfg.snapshot;
    m["mode"] = mode;
    m["model"] = model_json(cfg.backend.model);
    m["sample_size"] = prompt.sample_count;
    m["seed"] = seed;
    m["sampled_rows"] = prompt.sampled_rows;
    m["features"] = specs.size();
    m.output(a.out);
    m.write(manifest_path(a.manifest, a.out));
    out << specs.size() << " features written to " << a.out << "\n";
    return 0;
}

// ---- generate ----------------------------------------------------------------

struct GenerateArgs {
    std::string config, data, features, out = "augmented.csv", report = "report.json", manifest;
    std::string workflow, mode, fixture, policy, batch_dir, stem = "requests";
    std::vector<std::string> results;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(a.config);
    const auto table = load_csv(a.data, load_options(cfg));
    const auto workflow = a.workflow.empty() ? cfg.generation.workflow : a.workflow;
    const auto mode = a.mode.empty() ? cfg.backend.mode : a.mode;
    auto policy = cfg.generation.policy;
    if (a.policy == "strict") policy = ValuePolicy::Strict;
    else if (a.policy == "coerce") policy = ValuePolicy::Coerce;
    else if (!a.policy.empty()) throw ConfigError("unknown policy '" + a.policy + "'");

    std::vector<FeatureSpec> specs;
    std::vector<LlmRequest> requests;
    const auto texts = texts_of(table, cfg.dataset.text_column);
    const auto& settings = cfg.backend.model;
    Manifest m("generate");
    m.input(a.config);
    m.input(a.data);

    if (workflow == "auto") {
        if (a.features.empty()) throw ConfigError("the auto workflow needs --features");
        specs = parse_feature_specs(text::read_file(a.features));
        m.input(a.features);
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (texts[r].empty()) continue;
            const auto prompt = build_multi_feature_prompt(specs, texts[r], table.row_ids()[r]);
            requests.push_back(make_request(prompt, settings, cfg.backend.system_message));
        }
    } else if (workflow == "user") {
        if (cfg.generation.user_features.empty()) throw ConfigError("generation.user_features is empty");
        for (const auto& f : cfg.generation.user_features) specs.push_back(f.to_spec());
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (texts[r].empty()) continue;
            for (const auto& f : cfg.generation.user_features) {
                const auto prompt = build_single_feature_prompt(f, texts[r], table.row_ids()[r]);
                requests.push_back(make_request(prompt, settings, cfg.backend.system_message));
            }
        }
    } else {
        throw ConfigError("unknown workflow '" + workflow + "' (user|auto)");
    }
    m["config"] = cfg.snapshot;
    m["workflow"] = workflow;
    m["mode"] = mode;
    m["model"] = model_json(settings);
    m["requests"] = requests.size();

    if (mode == "batch-emit") {
        const fs::path dir = a.batch_dir.empty() ? cfg.backend.batch_dir : fs::path(a.batch_dir);
        fs::create_directories(dir);
        const auto files = emit_batch_files(requests, dir, a.stem, cfg.backend.batch_cap);
        for (const auto& f : files) m.output(f);
        m["batch_cap"] = cfg.backend.batch_cap;
        m.write(manifest_path(a.manifest, dir / (a.stem + ".jsonl")));
        out << requests.size() << " requests written to " << files.size() << " batch file(s) in " << dir.string()
            << "\n";
        return 0;
    }

    std::vector<LlmResponse> responses;
    std::vector<MalformedLine> malformed;
    if (mode == "batch-ingest") {
        if (a.results.empty()) throw ConfigError("batch-ingest needs --results");
        for (const auto& path : a.results) {
            auto ingest = ingest_batch_results(path);
            m.input(path);
            for (auto& mline : ingest.malformed) {
                err << "warning: " << path << ":" << mline.line << ": " << mline.message << "\n";
                malformed.push_back(std::move(mline));
            }
            for (auto& r : ingest.responses) responses.push_back(std::move(r));
        }
    } else {
        auto backend = make_backend(cfg, mode, a.fixture);
        responses = submit(requests, *backend, submit_options(cfg));
    }

    auto result = validate_and_attach(responses, specs, table, policy);
    if (workflow == "user") {
        for (const auto& f : cfg.generation.user_features) {
            if (!f.ordinal) continue;
            const auto name = f.to_spec().column_name();
            result.table = result.table.with_column(encode_ordinal(result.table.column(name), f.values));
        }
    }
    save_csv(result.table, a.out);

    Json report = result.report.to_json();
    report["policy"] = policy == ValuePolicy::Strict ? "strict" : "coerce";
    Json bad = Json::array();
    for (const auto& mline : malformed) bad.push_back({{"line", mline.line}, {"message", mline.message}});
    report["malformed_lines"] = std::move(bad);
    save_json_file(a.report, report);

    m["rows_total"] = result.report.rows_total;
    m["rows_valid"] = result.report.rows_valid;
    m["rows_invalid"] = result.report.rows_invalid;
    m.output(a.out);
    m.output(a.report);
    m.write(manifest_path(a.manifest, a.out));
    if (result.report.rows_invalid > 0) {
        err << "warning: " << result.report.rows_invalid << " invalid row(s) dropped, see " << a.report << "\n";
    }
    out << result.report.rows_valid << " of " << result.report.rows_total << " rows written to " << a.out << "\n";
    return 0;
}

// ---- validate ----------------------------------------------------------------

struct ValidateArgs {
    std::string config, data, out_csv = "validation.csv", out_json = "validation.json", manifest;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
};

std::vector<std::optional<double>> smog_values(const AugmentedTable& table, const std::string& text_column) {
    const auto texts = texts_of(table, text_column);
    std::vector<std::optional<double>> out(texts.size());
    for (std::size_t r = 0; r < texts.size(); ++r) {
        if (count_text(texts[r]).sentences > 0) out[r] = smog_index(texts[r]);
    }
    return out;
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(a.config);
    const auto table = load_csv(a.data, load_options(cfg));
    auto options = cfg.validation.bootstrap;
    if (a.reps) options.reps = *a.reps;
    if (a.seed) options.seed = *a.seed;

    std::vector<std::string> features = cfg.validation.features;
    const bool explicit_list = !features.empty();
    if (!explicit_list) {
        for (const auto& c : table.columns()) {
            if (c.name() == table.target_name() || c.name() == cfg.dataset.text_column) continue;
            if (is_categorical(c.kind())) features.push_back(c.name());
        }
    }
    std::vector<FeatureTestResult> results;
    for (const auto& f : features) {
        if (!table.has_column(f)) throw SchemaError("feature column '" + f + "' not in table");
        try {
            results.push_back(bootstrap_test(table, f, table.target_name(), options));
        } catch (const StatsError& e) {
            if (explicit_list) throw;
            err << "warning: skipping '" << f << "': " << e.what() << "\n";
        }
    }

    Json doc = validation_report_json(results, cfg.validation.robust_fraction);
    doc["alpha"] = options.alpha;
    doc["bootstrap_reps"] = options.reps;
    doc["seed"] = options.seed;
    const std::string method = cfg.validation.correlation == CorrelationMethod::Pearson ? "pearson" : "spearman";
    Json correlations = Json::array();
    for (const auto& check : cfg.validation.correlations) {
        if (!table.has_column(check.feature)) throw SchemaError("feature column '" + check.feature + "' not in table");
        const auto x = numeric_values(table.column(check.feature));
        const auto y = check.measure == "smog" ? smog_values(table, cfg.dataset.text_column)
                                               : numeric_values(table.column(check.measure));
        Json c;
        c["feature"] = check.feature;
        c["measure"] = check.measure;
        c["method"] = method;
        c["rho"] = correlate(x, y, cfg.validation.correlation);
        correlations.push_back(std::move(c));
    }
    doc["correlations"] = std::move(correlations);

    text::write_file(a.out_csv, validation_report_csv(results, cfg.validation.robust_fraction));
    save_json_file(a.out_json, doc);

    Manifest m("validate");
    m.input(a.config);
    m.input(a.data);
    m["config"] = cfg.snapshot;
    m["seed"] = options.seed;
    m["bootstrap_reps"] = options.reps;
    m["correlation_method"] = method;
    m.output(a.out_csv);
    m.output(a.out_json);
    m.write(manifest_path(a.manifest, a.out_json));
    out << results.size() << " feature(s) tested, report in " << a.out_csv << " and " << a.out_json << "\n";
    return 0;
}

// ---- mine --------------------------------------------------------------------

struct MineArgs {
    std::string config, data, experiment, out_json = "rules.json", out_txt = "rules.txt", manifest;
    bool no_dominant = false;
};

int cmd_mine(const MineArgs& a, std::ostream& out, std::ostream&) {
    const auto cfg = load_config(a.config);
    auto table = load_csv(a.data, load_options(cfg));
    const auto& ex = cfg.experiment(a.experiment);
    auto settings = ex.settings;
    if (a.no_dominant) settings.reduce_dominant = false;

    std::size_t excluded = 0;
    if (ex.binning) {
        auto binning = *ex.binning;
        if (binning.output_column.empty()) binning.output_column = settings.target;
        auto binned = bin_target(table, binning);
        table = std::move(binned.table);
        excluded = binned.excluded_rows;
    }
    const auto report = mine_action_rules(table, settings);

    Json doc = report.to_json();
    doc["experiment"] = ex.id;
    doc["excluded_rows"] = excluded;
    save_json_file(a.out_json, doc);
    text::write_file(a.out_txt, "experiment: " + ex.id + "\n" + report.to_text());

    Manifest m("mine");
    m.input(a.config);
    m.input(a.data);
    m["config"] = cfg.snapshot;
    m["experiment"] = ex.id;
    m["discovered"] = report.discovered.size();
    m["dominant"] = report.dominance_applied ? Json(report.dominant.size()) : Json(nullptr);
    m.output(a.out_json);
    m.output(a.out_txt);
    m.write(manifest_path(a.manifest, a.out_json));
    out << report.discovered.size() << " action rule(s) discovered";
    if (report.dominance_applied) out << ", " << report.dominant.size() << " dominant";
    out << "\n";
    return 0;
}

// ---- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
    std::string config, data, out = "metrics.json", manifest, representation, classifier, predictions_out;
    bool ordinal = false;
};

FeatureMatrix represent(const std::string& representation, const AugmentedTable& part, const TfidfModel* model,
                        const std::string& text_column) {
    if (representation == "llm") {
        auto llm = part;
        if (llm.has_column(text_column)) llm = llm.without_column(text_column);
        return table_features(llm);
    }
    const auto texts = texts_of(part, text_column);
    auto tfidf = tfidf_features(*model, part.row_ids(), texts);
    if (representation == "tfidf") return tfidf;
    auto llm = part.has_column(text_column) ? part.without_column(text_column) : part;
    return fuse_features(llm, tfidf);
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
    const auto cfg = load_config(a.config);
    const auto table = load_csv(a.data, load_options(cfg));
    const auto representation = a.representation.empty() ? cfg.evaluation.representation : a.representation;
    const auto classifier = a.classifier.empty() ? cfg.evaluation.classifier : a.classifier;
    if (representation != "llm" && representation != "tfidf" && representation != "fused") {
        throw ConfigError("unknown representation '" + representation + "' (llm|tfidf|fused)");
    }

    std::optional<std::vector<std::string>> order;
    if (a.ordinal) {
        if (table.target().kind() != ColumnKind::Ordinal) {
            throw ValidationError("--ordinal needs an ordinal target; '" + table.target_name() + "' is " +
                                  std::string(to_string(table.target().kind())));
        }
        order = table.target().categories();
    }

    Manifest m("evaluate");
    m.input(a.config);
    m.input(a.data);
    std::vector<Prediction> predictions;
    const std::string external = "external:";
    if (classifier.rfind(external, 0) == 0) {
        const fs::path path = classifier.substr(external.size());
        const auto predicted = parse_predictions_csv(text::read_file(path.string()));
        m.input(path);
        predictions = join_predictions(table, predicted);
    } else {
        // rows with a missing target cannot be scored or trained on
        std::vector<std::size_t> labelled;
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (table.target().cell(r)) labelled.push_back(r);
        }
        const auto [train, test] = split(table.select_rows(labelled), cfg.split);
        auto targets = [](const AugmentedTable& t) {
            std::vector<std::string> out;
            for (const auto& c : t.target().cells()) out.push_back(*c);
            return out;
        };
        const auto train_y = targets(train);
        const auto test_y = targets(test);

        std::optional<TfidfModel> model;
        if (representation != "llm") {
            TfidfSettings ts;
            ts.min_df = cfg.evaluation.tfidf_min_df;
            model = fit_tfidf(texts_of(train, cfg.dataset.text_column), ts);
        }
        const auto test_x = represent(representation, test, model ? &*model : nullptr, cfg.dataset.text_column);
        std::vector<std::string> predicted;
        if (classifier == "naive-mf" || classifier == "naive-uniform") {
            const NaiveClassifier c(train_y, classifier == "naive-mf" ? NaiveMode::MostFrequent : NaiveMode::Uniform,
                                    cfg.evaluation.seed);
            predicted = c.predict(test_x);
        } else if (classifier == "nb") {
            const auto train_x =
                represent(representation, train, model ? &*model : nullptr, cfg.dataset.text_column);
            const NaiveBayes c(train_x, train_y);
            predicted = c.predict(test_x);
        } else {
            throw ConfigError("unknown classifier '" + classifier + "' (naive-mf|naive-uniform|nb|external:PATH)");
        }
        for (std::size_t r = 0; r < test.n_rows(); ++r) {
            predictions.push_back({test.row_ids()[r], predicted[r], test_y[r]});
        }
        m["split"] = {{"train_fraction", cfg.split.train_fraction}, {"seed", cfg.split.seed}};
        m["train_rows"] = train.n_rows();
        m["test_rows"] = test.n_rows();
    }

    const auto metrics = evaluate(predictions, order);
    Json doc = metrics.to_json();
    doc["representation"] = representation;
    doc["classifier"] = classifier;
    save_json_file(a.out, doc);
    if (!a.predictions_out.empty()) text::write_file(a.predictions_out, predictions_csv(predictions));

    m["config"] = cfg.snapshot;
    m["representation"] = representation;
    m["classifier"] = classifier;
    m["seed"] = cfg.evaluation.seed;
    m.output(a.out);
    if (!a.predictions_out.empty()) m.output(a.predictions_out);
    m.write(manifest_path(a.manifest, a.out));
    out << metrics.to_text();
    return 0;
}

int exit_code(ErrorClass cls) {
    switch (cls) {
        case ErrorClass::User: return 1;
        case ErrorClass::Data: return 2;
        case ErrorClass::Backend: return 3;
    }
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"textfeat: LLM-derived text features, validation and action rules", "textfeat"};
    app.set_version_flag("--version", std::string(TEXTFEAT_VERSION));
    app.require_subcommand(1);

    DiscoverArgs da;
    auto* discover = app.add_subcommand("discover", "propose features from a data sample");
    discover->add_option("--config", da.config, "pipeline config (JSON)")->required();
    discover->add_option("--data", da.data, "input data CSV")->required();
    discover->add_option("--out", da.out, "features JSON to write");
    discover->add_option("--sample-size", da.sample_size, "example rows shown to the model");
    discover->add_option("--seed", da.seed, "sampling seed");
    discover->add_option("--mode", da.mode, "live|mock");
    discover->add_option("--fixture", da.fixture, "mock fixture JSON");
    discover->add_option("--manifest", da.manifest, "run manifest path");

    GenerateArgs ga;
    auto* generate = app.add_subcommand("generate", "compute feature values per row");
    generate->add_option("--config", ga.config)->required();
    generate->add_option("--data", ga.data)->required();
    generate->add_option("--features", ga.features, "features JSON (auto workflow)");
    generate->add_option("--workflow", ga.workflow, "user|auto");
    generate->add_option("--mode", ga.mode, "live|mock|batch-emit|batch-ingest");
    generate->add_option("--fixture", ga.fixture, "mock fixture JSON");
    generate->add_option("--policy", ga.policy, "strict|coerce");
    generate->add_option("--out", ga.out, "augmented CSV");
    generate->add_option("--report", ga.report, "generation report JSON");
    generate->add_option("--batch-dir", ga.batch_dir, "directory for batch request files");
    generate->add_option("--stem", ga.stem, "batch file name stem");
    generate->add_option("--results", ga.results, "batch result JSONL file(s)");
    generate->add_option("--manifest", ga.manifest);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "chi-squared and bootstrap tests per feature");
    validate->add_option("--config", va.config)->required();
    validate->add_option("--data", va.data, "augmented CSV")->required();
    validate->add_option("--out-csv", va.out_csv);
    validate->add_option("--out-json", va.out_json);
    validate->add_option("--reps", va.reps, "bootstrap replicates");
    validate->add_option("--seed", va.seed, "bootstrap seed");
    validate->add_option("--manifest", va.manifest);

    MineArgs ma;
    auto* mine = app.add_subcommand("mine", "mine action rules for one experiment");
    mine->add_option("--config", ma.config)->required();
    mine->add_option("--data", ma.data, "augmented CSV")->required();
    mine->add_option("--experiment", ma.experiment, "experiment id from the config")->required();
    mine->add_option("--out-json", ma.out_json);
    mine->add_option("--out-txt", ma.out_txt);
    mine->add_flag("--no-dominant", ma.no_dominant, "skip dominant-rule reduction");
    mine->add_option("--manifest", ma.manifest);

    EvaluateArgs ea;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "train/test a classifier and report metrics");
    evaluate_cmd->add_option("--config", ea.config)->required();
    evaluate_cmd->add_option("--data", ea.data, "augmented CSV")->required();
    evaluate_cmd->add_option("--representation", ea.representation, "llm|tfidf|fused");
    evaluate_cmd->add_option("--classifier", ea.classifier, "naive-mf|naive-uniform|nb|external:PATH");
    evaluate_cmd->add_flag("--ordinal", ea.ordinal, "report MAE on the ordinal target");
    evaluate_cmd->add_option("--out", ea.out);
    evaluate_cmd->add_option("--predictions-out", ea.predictions_out);
    evaluate_cmd->add_option("--manifest", ea.manifest);

    std::vector<const char*> argv;
    argv.push_back("textfeat");
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (discover->parsed()) return cmd_discover(da, out, err);
        if (generate->parsed()) return cmd_generate(ga, out, err);
        if (validate->parsed()) return cmd_validate(va, out, err);
        if (mine->parsed()) return cmd_mine(ma, out, err);
        if (evaluate_cmd->parsed()) return cmd_evaluate(ea, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.error_class());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace textfeat

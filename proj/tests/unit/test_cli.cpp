#include <doctest.h>

#include "textfeat/cli.hpp"
#include "textfeat/csv.hpp"
#include "textfeat/error.hpp"
#include "textfeat/rng.hpp"
#include "textfeat/text.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace textfeat;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(TEXTFEAT_FIXTURES) / "pipeline";

struct Run {
    int code;
    std::string out, err;
};

// Scratch copy of the pipeline fixture; commands run with paths inside it.
struct Workspace {
    fs::path dir;

    explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("textfeat_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        for (const char* f : {"data.csv", "config.json", "mock_replies.json"}) fs::copy_file(kFixture / f, dir / f);
    }
    ~Workspace() { fs::remove_all(dir); }

    std::string path(const std::string& f) const { return (dir / f).string(); }

    Json config() const { return Json::parse(text::read_file(path("config.json"))); }
    void write_config(const Json& doc) const { text::write_file(path("config.json"), doc.dump(2)); }
    void write(const std::string& f, const std::string& content) const { text::write_file(path(f), content); }

    Run run(const std::vector<std::string>& args) const {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return {code, out.str(), err.str()};
    }

    Run discover() const {
        return run({"discover", "--config", path("config.json"), "--data", path("data.csv"), "--out",
                    path("features.json")});
    }
    Run generate() const {
        return run({"generate", "--config", path("config.json"), "--data", path("data.csv"), "--features",
                    path("features.json"), "--out", path("augmented.csv"), "--report", path("report.json")});
    }
};

EnvLookup env_of(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
        const auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

// rows with a categorical signal that decides the target and noise-only text
std::string synthetic_csv(std::size_t n, std::uint64_t seed, bool balanced_only = false) {
    Rng rng(seed);
    const std::vector<std::string> words{"alpha", "beta", "gamma", "delta", "omega", "sigma", "kappa", "theta"};
    std::ostringstream out;
    csv::write_record(out, {"row_id", "abstract", "signal", "evaluation"});
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        for (int w = 0; w < 8; ++w) text += (w ? " " : "") + words[rng.below(words.size())];
        const bool good = i % 2 == 0;
        const std::string signal = balanced_only ? "s0" : (rng.below(10) == 0 ? !good : good) ? "s1" : "s0";
        csv::write_record(out, {"x" + std::to_string(i), text, signal, good ? "good" : "bad"});
    }
    return out.str();
}

Json synthetic_config() {
    return Json::parse(R"({
      "dataset": {"name": "synthetic", "text_column": "abstract", "target_column": "evaluation",
                  "columns": {"abstract": {"kind": "text"},
                              "signal": {"kind": "categorical", "categories": ["s0", "s1"]}}},
      "llm": {"mode": "mock"},
      "split": {"train_fraction": 0.8, "seed": 1},
      "evaluation": {"classifier": "nb", "seed": 2}
    })");
}

double accuracy_of(const Workspace& w, const std::string& representation, const std::string& classifier) {
    const auto r = w.run({"evaluate", "--config", w.path("config.json"), "--data", w.path("data.csv"),
                          "--representation", representation, "--classifier", classifier, "--out",
                          w.path("metrics.json")});
    REQUIRE(r.code == 0);
    return Json::parse(text::read_file(w.path("metrics.json")))["accuracy"].get<double>();
}

}  // namespace

TEST_CASE("config parsing resolves paths and applies environment overrides") {
    Json doc = Json::parse(text::read_file((kFixture / "config.json").string()));
    doc["llm"]["api_key"] = "from-file";
    doc["llm"]["api_key_env"] = "MY_KEY";
    const auto cfg = parse_config(doc, "/base", env_of({{"MY_KEY", "from-env"}, {"TEXTFEAT_MODEL", "other-model"}}));
    CHECK(cfg.backend.mock_fixture == fs::path("/base/mock_replies.json"));
    CHECK(cfg.backend.api_key == "from-env");
    CHECK(cfg.backend.model.model == "other-model");
    CHECK(cfg.backend.model.temperature == 0.0);
    CHECK_FALSE(cfg.snapshot["llm"].contains("api_key"));
    CHECK(cfg.snapshot.dump().find("from-") == std::string::npos);
    CHECK(cfg.experiment("1").settings.flexible_attributes == std::vector<std::string>{"rigor", "grammar"});
    CHECK_THROWS_AS(cfg.experiment("9"), ConfigError);

    const auto top = parse_config(doc, "/base", env_of({{"TEXTFEAT_API_KEY", "top"}, {"MY_KEY", "named"}}));
    CHECK(top.backend.api_key == "top");

    Json bad = doc;
    bad["llm"]["mode"] = "carrier-pigeon";
    CHECK_THROWS_AS(parse_config(bad, "/base", env_of({})), ConfigError);
}

TEST_CASE("fnv1a digest") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("discover and generate in mock mode write outputs and manifests") {
    const Workspace w("mock");
    auto r = w.discover();
    CHECK(r.code == 0);
    CHECK(fs::exists(w.path("features.json")));
    CHECK(fs::exists(w.path("features.json.manifest.json")));
    r = w.generate();
    REQUIRE(r.code == 0);
    CHECK(r.err.find("2 invalid row(s)") != std::string::npos);
    const auto manifest = Json::parse(text::read_file(w.path("augmented.csv.manifest.json")));
    CHECK(manifest["command"] == "generate");
    CHECK(manifest["rows_valid"] == 48);
    CHECK(manifest.dump().find(w.dir.string()) == std::string::npos);
    const auto report = Json::parse(text::read_file(w.path("report.json")));
    CHECK(report["policy"] == "strict");
}

TEST_CASE("exit codes by error class") {
    const Workspace w("codes");
    CHECK(w.run({"nonsense"}).code == 1);
    CHECK(w.run({"discover", "--data", w.path("data.csv")}).code == 1);

    // prose where the feature list should be: data error
    Json replies = Json::parse(text::read_file(w.path("mock_replies.json")));
    replies["discovery::features"] = "I think the abstracts vary in quality.";
    w.write("prose.json", replies.dump());
    auto r = w.run({"discover", "--config", w.path("config.json"), "--data", w.path("data.csv"), "--out",
                    w.path("f.json"), "--fixture", w.path("prose.json")});
    CHECK(r.code == 2);

    // no fixture entry for the request: backend error
    w.write("empty.json", "{}");
    r = w.run({"discover", "--config", w.path("config.json"), "--data", w.path("data.csv"), "--out",
               w.path("f.json"), "--fixture", w.path("empty.json")});
    CHECK(r.code == 3);

    // live mode without a key fails before any request
    auto cfg = w.config();
    cfg["llm"]["api_key_env"] = "TEXTFEAT_UNIT_NO_SUCH_KEY";
    w.write_config(cfg);
    ::unsetenv("TEXTFEAT_API_KEY");
    ::unsetenv("TEXTFEAT_UNIT_NO_SUCH_KEY");
    r = w.run({"discover", "--config", w.path("config.json"), "--data", w.path("data.csv"), "--out",
               w.path("f.json"), "--mode", "live"});
    CHECK(r.code == 1);
    CHECK(r.err.find("key") != std::string::npos);
    CHECK_FALSE(fs::exists(w.path("f.json")));

    // missing input file
    r = w.run({"validate", "--config", w.path("config.json"), "--data", w.path("absent.csv")});
    CHECK(r.code != 0);
}

TEST_CASE("batch emit writes capped files") {
    const Workspace w("batch");
    REQUIRE(w.discover().code == 0);
    auto cfg = w.config();
    cfg["llm"]["batch_cap"] = 20;
    w.write_config(cfg);
    const auto r = w.run({"generate", "--config", w.path("config.json"), "--data", w.path("data.csv"), "--features",
                          w.path("features.json"), "--mode", "batch-emit", "--batch-dir", w.path("b"), "--stem",
                          "req"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(w.path("b/req_001.jsonl")));
    CHECK(fs::exists(w.path("b/req_003.jsonl")));
    CHECK_FALSE(fs::exists(w.path("b/req_004.jsonl")));
    CHECK(fs::exists(w.path("b/req.jsonl.manifest.json")));
}

TEST_CASE("validate flags a feature that copies the target") {
    const Workspace w("validate");
    std::ostringstream data;
    csv::write_record(data, {"row_id", "abstract", "leak", "noise", "evaluation"});
    Rng rng(4);
    for (int i = 0; i < 120; ++i) {
        const std::string y = i % 2 ? "good" : "bad";
        csv::write_record(data, {"v" + std::to_string(i), "text", y == "good" ? "g" : "b",
                                 rng.below(2) ? "n1" : "n2", y});
    }
    w.write("aug.csv", data.str());
    auto cfg = w.config();
    cfg["dataset"]["columns"]["abstract"] = {{"kind", "text"}};
    cfg["validation"]["bootstrap_reps"] = 100;
    w.write_config(cfg);
    const auto r = w.run({"validate", "--config", w.path("config.json"), "--data", w.path("aug.csv"), "--out-csv",
                          w.path("v.csv"), "--out-json", w.path("v.json")});
    REQUIRE(r.code == 0);
    const auto doc = Json::parse(text::read_file(w.path("v.json")));
    bool seen = false;
    for (const auto& f : doc["features"]) {
        if (f["feature"] != "leak") continue;
        seen = true;
        CHECK(f["stars"] == "***");
        CHECK(f["cramers_v"].get<double>() == doctest::Approx(1.0));
        CHECK(f["robust"] == true);
    }
    CHECK(seen);
    CHECK(fs::exists(w.path("v.csv")));
}

TEST_CASE("mine with and without dominance reduction") {
    const Workspace w("mine");
    REQUIRE(w.discover().code == 0);
    REQUIRE(w.generate().code == 0);
    auto r = w.run({"mine", "--config", w.path("config.json"), "--data", w.path("augmented.csv"), "--experiment", "1",
                    "--out-json", w.path("rules.json"), "--out-txt", w.path("rules.txt")});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(text::read_file(w.path("rules.json"))).contains("dominant"));
    r = w.run({"mine", "--config", w.path("config.json"), "--data", w.path("augmented.csv"), "--experiment", "1",
               "--out-json", w.path("all.json"), "--out-txt", w.path("all.txt"), "--no-dominant"});
    REQUIRE(r.code == 0);
    const auto all = Json::parse(text::read_file(w.path("all.json")));
    CHECK_FALSE(all.contains("dominant"));
    CHECK(all["experiment"] == "1");
    CHECK(text::read_file(w.path("all.txt")).rfind("experiment: 1", 0) == 0);
    r = w.run({"mine", "--config", w.path("config.json"), "--data", w.path("augmented.csv"), "--experiment", "7"});
    CHECK(r.code == 1);
}

TEST_CASE("evaluate with external predictions") {
    const Workspace w("external");
    w.write("preds.csv", "row_id,predicted\np01,bad\np02,good\np03,bad\n");
    const auto r = w.run({"evaluate", "--config", w.path("config.json"), "--data", w.path("data.csv"),
                          "--classifier", "external:" + w.path("preds.csv"), "--out", w.path("m.json")});
    REQUIRE(r.code == 0);
    const auto m = Json::parse(text::read_file(w.path("m.json")));
    CHECK(m["n"] == 3);
    CHECK(fs::exists(w.path("m.json.manifest.json")));
    w.write("bad.csv", "row_id,predicted\nzz,bad\n");
    CHECK(w.run({"evaluate", "--config", w.path("config.json"), "--data", w.path("data.csv"), "--classifier",
                 "external:" + w.path("bad.csv"), "--out", w.path("m2.json")})
              .code == 2);
}

TEST_CASE("fused features do at least as well as tf-idf alone") {
    const Workspace w("fused");
    w.write("data.csv", synthetic_csv(400, 21));
    w.write_config(synthetic_config());
    const double tf = accuracy_of(w, "tfidf", "nb");
    const double fused = accuracy_of(w, "fused", "nb");
    const double llm = accuracy_of(w, "llm", "nb");
    CHECK(fused >= tf);
    CHECK(llm > 0.8);
    CHECK(tf < 0.7);
}

TEST_CASE("most-frequent baseline sits near one half on a balanced target") {
    const Workspace w("baseline");
    w.write("data.csv", synthetic_csv(1000, 5, true));
    w.write_config(synthetic_config());
    const double acc = accuracy_of(w, "llm", "naive-mf");
    CHECK(acc == doctest::Approx(0.5).epsilon(0.2));
    CHECK(w.run({"evaluate", "--config", w.path("config.json"), "--data", w.path("data.csv"), "--ordinal"}).code == 2);
}

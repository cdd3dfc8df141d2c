#include <doctest.h>

#include "textfeat/error.hpp"
#include "textfeat/generation.hpp"
#include "textfeat/llm.hpp"
#include "textfeat/text.hpp"

#include <atomic>
#include <filesystem>
#include <sstream>

using namespace textfeat;
namespace fs = std::filesystem;

namespace {

UserFeature rigor_feature() {
    UserFeature f;
    f.name = "rigor";
    f.subject = "methodological rigor of the research";
    f.definition = "Rigor is the care taken in design and analysis.";
    f.values = {"low", "medium", "high"};
    f.ordinal = true;
    return f;
}

std::vector<FeatureSpec> specs() {
    FeatureSpec rigor;
    rigor.feature_name = "rigor";
    rigor.possible_values = {"low", "medium", "high"};
    rigor.extraction_query = "How rigorous?";
    FeatureSpec area;
    area.feature_name = "area";
    area.possible_values = {"chemistry", "biology", "Other"};
    area.other_fallback = true;
    area.extraction_query = "Which area?";
    return {rigor, area};
}

AugmentedTable three_rows() {
    return AugmentedTable({"a", "b", "c"},
                          {Column("abstract", ColumnKind::Text, {"one", "two", "three"}),
                           Column("y", ColumnKind::Binary, {"bad", "good", "bad"}, {"bad", "good"})},
                          "y");
}

LlmResponse ok(std::string id, std::string content) { return {std::move(id), std::move(content), ResponseStatus::Ok, ""}; }

fs::path temp_dir(const char* name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

class FlakyBackend final : public LlmBackend {
public:
    explicit FlakyBackend(int failures) : failures_(failures) {}
    LlmResponse complete(const LlmRequest& r) override {
        if (calls_++ < failures_) return {r.custom_id, "", ResponseStatus::TransportError, "timeout"};
        return {r.custom_id, "{}", ResponseStatus::Ok, ""};
    }
    bool uses_network() const override { return false; }
    int calls() const { return calls_; }

private:
    int failures_;
    std::atomic<int> calls_{0};
};

}  // namespace

TEST_CASE("single feature prompt") {
    const auto p = build_single_feature_prompt(rigor_feature(), "We did things.", "r7");
    CHECK(p.custom_id() == "r7::rigor");
    CHECK(p.body.find("assess the methodological rigor of the research") != std::string::npos);
    CHECK(p.body.find("low, medium, high") != std::string::npos);
    CHECK(p.body.find("\"rigor\": \"value\"") != std::string::npos);
    CHECK(p.body.find("{{") == std::string::npos);
    CHECK(p.body.substr(p.body.size() - 14) == "We did things.");
    CHECK(p.expected_schema.at("rigor").size() == 3);
    CHECK_THROWS_AS(build_single_feature_prompt(rigor_feature(), "   ", "r1"), ValidationError);
}

TEST_CASE("multi feature prompt is JSON listing every feature") {
    const auto s = specs();
    const auto p = build_multi_feature_prompt(s, "Some text", "r1");
    CHECK(p.custom_id() == "r1::features");
    const auto doc = Json::parse(p.body);
    CHECK(doc["input_text"] == "Some text");
    CHECK(doc["features"].size() == 2);
    CHECK(p.expected_schema.at("area").back() == "Other");
    auto dup = s;
    dup.push_back(s[0]);
    CHECK_THROWS_AS(build_multi_feature_prompt(dup, "t", "r1"), ValidationError);
}

TEST_CASE("requests carry model settings; custom ids split at the last separator") {
    ModelSettings m;
    m.deterministic = true;
    m.temperature = 0.7;
    const auto req = make_request(build_multi_feature_prompt(specs(), "t", "a::b"), m, "sys");
    CHECK(req.custom_id == "a::b::features");
    CHECK(req.temperature == 0.0);
    REQUIRE(req.messages.size() == 2);
    CHECK(req.messages[0].role == "system");
    const auto [row, prompt] = split_custom_id(req.custom_id);
    CHECK(row == "a::b");
    CHECK(prompt == "features");
}

TEST_CASE("mock backend serves fixtures and never touches the network") {
    MockBackend mock({{"r1::features", "{\"rigor\": \"low\"}"}, {"r2::features", ""}});
    CHECK_FALSE(mock.uses_network());
    LlmRequest a{"r1::features", "m", 0, 0.9, false, {}};
    LlmRequest b{"r2::features", "m", 0, 0.9, false, {}};
    LlmRequest c{"r3::features", "m", 0, 0.9, false, {}};
    CHECK(mock.complete(a).status == ResponseStatus::Ok);
    CHECK(mock.complete(b).status == ResponseStatus::Refused);
    CHECK(mock.complete(c).status == ResponseStatus::TransportError);
    CHECK(mock.calls() == 3);
    CHECK(mock.call_log().size() == 3);
}

TEST_CASE("live backend refuses to start without a key") {
    HttpBackendConfig cfg;
    cfg.api_key = "";
    CHECK_THROWS_AS(HttpBackend{cfg}, ConfigError);
    cfg.api_key = "k";
    cfg.endpoint = "not a url";
    CHECK_THROWS_AS(HttpBackend{cfg}, ConfigError);
}

TEST_CASE("chat completion body and response parsing") {
    LlmRequest r{"x", "gpt", 0.0, 0.9, true, {{"user", "hi"}}};
    const auto body = chat_completion_body(r);
    CHECK(body["model"] == "gpt");
    CHECK(body["messages"][0]["content"] == "hi");
    const auto resp = parse_chat_completion(
        "x", Json::parse(R"({"choices": [{"message": {"role": "assistant", "content": "{\"a\": 1}"}}]})"));
    CHECK(resp.status == ResponseStatus::Ok);
    CHECK(resp.content == "{\"a\": 1}");
    const auto refused = parse_chat_completion(
        "x", Json::parse(R"({"choices": [{"message": {"role": "assistant", "content": null, "refusal": "no"}}]})"));
    CHECK(refused.status == ResponseStatus::Refused);
}

TEST_CASE("submit retries transport errors with capped backoff") {
    FlakyBackend backend(2);
    std::vector<std::chrono::milliseconds> sleeps;
    SubmitOptions opt;
    opt.parallelism = 1;
    opt.max_attempts = 3;
    opt.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };
    const std::vector<LlmRequest> reqs{{"a::f", "m", 0, 0.9, false, {}}};
    const auto out = submit(reqs, backend, opt);
    REQUIRE(out.size() == 1);
    CHECK(out[0].status == ResponseStatus::Ok);
    CHECK(backend.calls() == 3);
    CHECK(sleeps == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500),
                                                           std::chrono::milliseconds(1000)});
    FlakyBackend hopeless(10);
    const auto failed = submit(reqs, hopeless, opt);
    CHECK(failed[0].status == ResponseStatus::TransportError);
    const std::vector<LlmRequest> dup{reqs[0], reqs[0]};
    CHECK_THROWS(submit(dup, backend, opt));
}

TEST_CASE("submit output order matches input under parallelism") {
    std::map<std::string, std::string, std::less<>> fixtures;
    std::vector<LlmRequest> reqs;
    for (int i = 0; i < 200; ++i) {
        const auto id = "r" + std::to_string(i) + "::features";
        fixtures[id] = std::to_string(i);
        reqs.push_back({id, "m", 0, 0.9, false, {}});
    }
    MockBackend mock(fixtures);
    SubmitOptions opt;
    opt.parallelism = 8;
    const auto out = submit(reqs, mock, opt);
    for (int i = 0; i < 200; ++i) CHECK(out[static_cast<std::size_t>(i)].content == std::to_string(i));
}

TEST_CASE("batch files split by cap and round trip") {
    std::vector<LlmRequest> reqs;
    for (int i = 0; i < 25; ++i) {
        reqs.push_back({"r" + std::to_string(i) + "::features", "gpt", 0.0, 0.9, true, {{"user", "text " + std::to_string(i)}}});
    }
    const auto dir = temp_dir("textfeat_unit_batch");
    const auto files = emit_batch_files(reqs, dir, "run", 10);
    REQUIRE(files.size() == 3);
    CHECK(files[0].filename() == "run_001.jsonl");
    CHECK(files[2].filename() == "run_003.jsonl");
    std::vector<LlmRequest> back;
    for (const auto& f : files) {
        for (auto& r : read_batch_requests(f)) back.push_back(std::move(r));
    }
    CHECK(back == reqs);
    const auto line = batch_request_line(reqs[0]);
    CHECK(line["method"] == "POST");
    CHECK(line["url"] == "/v1/chat/completions");
    auto dup = reqs;
    dup.push_back(reqs[0]);
    CHECK_THROWS(emit_batch_file(dup, dir / "dup.jsonl"));
    CHECK_FALSE(fs::exists(dir / "dup.jsonl"));
    fs::remove_all(dir);
}

TEST_CASE("batch results: malformed lines are reported with line numbers") {
    std::string jsonl = batch_result_line("a::features", "{\"rigor\": \"low\"}").dump() + "\n";
    jsonl += "this is not json\n";
    jsonl += batch_result_line("b::features", "{\"rigor\": \"high\"}").dump() + "\n";
    jsonl += "{\"custom_id\": \"c::features\"}\n";
    const auto ingest = parse_batch_results(jsonl);
    CHECK(ingest.responses.size() == 2);
    REQUIRE(ingest.malformed.size() == 2);
    CHECK(ingest.malformed[0].line == 2);
    CHECK(ingest.malformed[1].line == 4);
}

TEST_CASE("strict policy drops rows with out-of-space, missing or unusable answers") {
    const auto s = specs();
    const std::vector<LlmResponse> responses{
        ok("a::features", R"({"features": [{"feature_name": "rigor", "answer": "high"},
                                            {"feature_name": "area", "answer": "chemistry"}]})"),
        ok("b::features", R"({"rigor": "extreme", "area": "biology"})"),
        ok("c::features", "I cannot answer that."),
    };
    const auto res = validate_and_attach(responses, s, three_rows(), ValuePolicy::Strict);
    CHECK(res.report.rows_total == 3);
    CHECK(res.report.rows_valid == 1);
    CHECK(res.report.rows_invalid == 2);
    CHECK(res.report.rows_valid + res.report.rows_invalid == res.report.rows_total);
    CHECK(res.table.row_ids() == std::vector<std::string>{"a"});
    CHECK(res.table.column("rigor").cell(0) == "high");
    REQUIRE(res.report.invalid_details.size() == 2);
    CHECK(res.report.invalid_details[0].value == "extreme");
}

TEST_CASE("coerce policy normalises case and falls back to Other") {
    const auto s = specs();
    const std::vector<LlmResponse> responses{
        ok("a::features", R"({"rigor": " HIGH ", "area": "astronomy"})"),
        ok("b::features", R"({"rigor": "extreme", "area": "Biology"})"),
        ok("c::features", R"({"rigor": "low", "area": "chemistry"})"),
    };
    const auto res = validate_and_attach(responses, s, three_rows(), ValuePolicy::Coerce);
    CHECK(res.report.rows_valid == 3);
    CHECK(res.table.column("rigor").cell(0) == "high");
    CHECK(res.table.column("area").cell(0) == "Other");
    CHECK(res.table.column("rigor").missing(1));
    CHECK(res.table.column("area").cell(1) == "biology");
    CHECK(res.report.values_coerced == 4);
}

TEST_CASE("attach rejects responses for unknown rows and is deterministic") {
    const auto s = specs();
    const std::vector<LlmResponse> bad{ok("zzz::features", "{}")};
    CHECK_THROWS_AS(validate_and_attach(bad, s, three_rows(), ValuePolicy::Strict), ValidationError);

    const std::vector<LlmResponse> responses{
        ok("c::features", R"({"rigor": "low", "area": "chemistry"})"),
        ok("a::features", R"({"rigor": "high", "area": "biology"})"),
        ok("b::features", R"({"rigor": "medium", "area": "Other"})"),
    };
    auto bytes = [&] {
        std::ostringstream out;
        write_csv(validate_and_attach(responses, s, three_rows(), ValuePolicy::Strict).table, out);
        return out.str();
    };
    CHECK(bytes() == bytes());
}

TEST_CASE("per-feature responses from the user workflow merge per row") {
    const auto f = rigor_feature();
    const std::vector<FeatureSpec> s{f.to_spec()};
    const std::vector<LlmResponse> responses{
        ok("a::rigor", "```json\n{\"rigor\": \"low\"}\n```"),
        ok("b::rigor", "{\"rigor\": \"medium\"}"),
        ok("c::rigor", "{\"rigor\": \"high\"}"),
    };
    const auto res = validate_and_attach(responses, s, three_rows(), ValuePolicy::Strict);
    CHECK(res.report.rows_valid == 3);
    const auto enc = encode_ordinal(res.table.column("rigor"), f.values);
    CHECK(enc.code(0) == 0);
    CHECK(enc.code(2) == 2);
}

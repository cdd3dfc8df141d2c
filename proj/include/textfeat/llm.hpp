#pragma once

#include "textfeat/json_util.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace textfeat {

struct ChatMessage {
    std::string role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct LlmRequest {
    std::string custom_id;
    std::string model;
    double temperature = 0.0;
    double top_p = 0.9;
    bool deterministic = false;  // greedy decoding; implies temperature 0
    std::vector<ChatMessage> messages;

    bool operator==(const LlmRequest&) const = default;
};

enum class ResponseStatus { Ok, Refused, TransportError };

std::string_view to_string(ResponseStatus status);

struct LlmResponse {
    std::string custom_id;
    std::string content;
    ResponseStatus status = ResponseStatus::Ok;
    std::string error;  // diagnostics for non-ok responses
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    // Must be safe to call concurrently. Transport problems are reported
    // through the response status, never thrown.
    virtual LlmResponse complete(const LlmRequest& request) = 0;
    virtual bool uses_network() const = 0;
};

// Serves fixed contents keyed by custom_id. Unknown ids come back as
// transport errors.
class MockBackend final : public LlmBackend {
public:
    explicit MockBackend(std::map<std::string, std::string, std::less<>> fixtures);
    // Fixture file: a JSON object mapping custom_id to the content string.
    static MockBackend from_file(const std::filesystem::path& path);
    static std::map<std::string, std::string, std::less<>> read_fixtures(const std::filesystem::path& path);

    LlmResponse complete(const LlmRequest& request) override;
    bool uses_network() const override { return false; }

    std::size_t calls() const { return calls_.load(); }
    std::vector<std::string> call_log() const;

private:
    std::map<std::string, std::string, std::less<>> fixtures_;
    std::atomic<std::size_t> calls_{0};
    mutable std::mutex log_mutex_;
    std::vector<std::string> log_;
};

struct HttpBackendConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key;
    std::chrono::seconds timeout{120};
};

// Chat-completion client over HTTP(S). Throws ConfigError from the
// constructor when the key is missing or the endpoint is not a URL, so no
// request is attempted with a broken configuration.
class HttpBackend final : public LlmBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    LlmResponse complete(const LlmRequest& request) override;
    bool uses_network() const override { return true; }

private:
    HttpBackendConfig config_;
    std::string origin_;  // scheme://host[:port]
    std::string path_;
};

// Chat-completion request body shared by the live client and batch files.
Json chat_completion_body(const LlmRequest& request);
// Extracts content/refusal from a chat-completion response body.
LlmResponse parse_chat_completion(std::string custom_id, const Json& body);

struct SubmitOptions {
    std::size_t parallelism = 4;
    int max_attempts = 3;
    std::chrono::milliseconds base_backoff{500};
    std::chrono::milliseconds max_backoff{8000};
    // Injected for tests; defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;
};

// Runs every request through the backend with at most `parallelism` in
// flight. Transport errors are retried with doubling backoff capped at
// max_backoff. Output order matches input order.
std::vector<LlmResponse> submit(std::span<const LlmRequest> requests, LlmBackend& backend,
                                const SubmitOptions& options = {});

inline constexpr std::size_t kDefaultBatchCap = 600;
inline constexpr std::string_view kBatchUrl = "/v1/chat/completions";

Json batch_request_line(const LlmRequest& request);
LlmRequest parse_batch_request_line(std::string_view line);

// Writes one JSONL request per line. Duplicate custom_ids are rejected
// before anything is written. Returns the number of lines.
std::size_t emit_batch_file(std::span<const LlmRequest> requests, const std::filesystem::path& path);

// Splits requests over STEM_001.jsonl, STEM_002.jsonl, ... with at most
// max_per_file lines each.
std::vector<std::filesystem::path> emit_batch_files(std::span<const LlmRequest> requests,
                                                    const std::filesystem::path& directory,
                                                    std::string_view stem,
                                                    std::size_t max_per_file = kDefaultBatchCap);

std::vector<LlmRequest> read_batch_requests(const std::filesystem::path& path);

struct MalformedLine {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct BatchIngest {
    std::vector<LlmResponse> responses;
    std::vector<MalformedLine> malformed;
};

// Result line in the batch output format, for synthesized or recorded runs.
Json batch_result_line(const std::string& custom_id, const std::string& content);

BatchIngest parse_batch_results(std::string_view jsonl);
BatchIngest ingest_batch_results(const std::filesystem::path& path);

}  // namespace textfeat

#include "textfeat/error.hpp"
#include "textfeat/llm.hpp"
#include "textfeat/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <regex>
#include <set>
#include <thread>

namespace textfeat {

std::string_view to_string(ResponseStatus status) {
    switch (status) {
        case ResponseStatus::Ok: return "ok";
        case ResponseStatus::Refused: return "refused";
        case ResponseStatus::TransportError: return "transport-error";
    }
    return "transport-error";
}

MockBackend::MockBackend(std::map<std::string, std::string, std::less<>> fixtures)
    : fixtures_(std::move(fixtures)) {}

std::map<std::string, std::string, std::less<>> MockBackend::read_fixtures(const std::filesystem::path& path) {
    const Json doc = load_json_file(path.string());
    if (!doc.is_object()) throw ConfigError("mock fixture " + path.string() + " must be a JSON object");
    std::map<std::string, std::string, std::less<>> fixtures;
    for (const auto& [key, value] : doc.items()) {
        fixtures.emplace(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    return fixtures;
}

MockBackend MockBackend::from_file(const std::filesystem::path& path) { return MockBackend(read_fixtures(path)); }

LlmResponse MockBackend::complete(const LlmRequest& request) {
    ++calls_;
    {
        std::lock_guard lock(log_mutex_);
        log_.push_back(request.custom_id);
    }
    const auto it = fixtures_.find(request.custom_id);
    if (it == fixtures_.end()) {
        return {request.custom_id, "", ResponseStatus::TransportError, "no fixture for custom_id"};
    }
    if (it->second.empty()) {
        return {request.custom_id, "", ResponseStatus::Refused, "empty fixture content"};
    }
    return {request.custom_id, it->second, ResponseStatus::Ok, ""};
}

std::vector<std::string> MockBackend::call_log() const {
    std::lock_guard lock(log_mutex_);
    auto out = log_;
    std::sort(out.begin(), out.end());
    return out;
}

Json chat_completion_body(const LlmRequest& request) {
    Json body;
    body["model"] = request.model;
    Json messages = Json::array();
    for (const auto& m : request.messages) {
        Json msg;
        msg["role"] = m.role;
        msg["content"] = m.content;
        messages.push_back(std::move(msg));
    }
    body["messages"] = std::move(messages);
    body["temperature"] = request.deterministic ? 0.0 : request.temperature;
    body["top_p"] = request.top_p;
    return body;
}

LlmResponse parse_chat_completion(std::string custom_id, const Json& body) {
    LlmResponse out;
    out.custom_id = std::move(custom_id);
    const auto choices = body.find("choices");
    if (choices == body.end() || !choices->is_array() || choices->empty()) {
        out.status = ResponseStatus::TransportError;
        out.error = "response has no choices";
        return out;
    }
    const auto& choice = (*choices)[0];
    const auto message = choice.find("message");
    if (message == choice.end() || !message->is_object()) {
        out.status = ResponseStatus::TransportError;
        out.error = "choice has no message";
        return out;
    }
    if (const auto refusal = message->find("refusal"); refusal != message->end() && refusal->is_string()) {
        out.status = ResponseStatus::Refused;
        out.error = refusal->get<std::string>();
        return out;
    }
    if (const auto fin = choice.find("finish_reason");
        fin != choice.end() && fin->is_string() && *fin == "content_filter") {
        out.status = ResponseStatus::Refused;
        out.error = "content_filter";
        return out;
    }
    const auto content = message->find("content");
    if (content == message->end() || !content->is_string() || content->get<std::string>().empty()) {
        out.status = ResponseStatus::Refused;
        out.error = "empty content";
        return out;
    }
    out.content = content->get<std::string>();
    return out;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.api_key.empty()) {
        throw ConfigError("live backend needs an API key (set it in the environment)");
    }
    static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.endpoint, m, url)) {
        throw ConfigError("endpoint '" + config_.endpoint + "' is not an http(s) URL");
    }
    origin_ = m[1].str();
    path_ = m[2].matched ? m[2].str() : "/";
}

LlmResponse HttpBackend::complete(const LlmRequest& request) {
    httplib::Client client(origin_);
    client.set_bearer_token_auth(config_.api_key);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    const auto result = client.Post(path_, chat_completion_body(request).dump(), "application/json");
    if (!result) {
        return {request.custom_id, "", ResponseStatus::TransportError,
                "http error: " + httplib::to_string(result.error())};
    }
    if (result->status != 200) {
        return {request.custom_id, "", ResponseStatus::TransportError,
                "http status " + std::to_string(result->status)};
    }
    if (!Json::accept(result->body)) {
        return {request.custom_id, "", ResponseStatus::TransportError, "response body is not JSON"};
    }
    return parse_chat_completion(request.custom_id, Json::parse(result->body));
}

std::vector<LlmResponse> submit(std::span<const LlmRequest> requests, LlmBackend& backend,
                                const SubmitOptions& options) {
    {
        std::set<std::string_view> ids;
        for (const auto& r : requests) {
            if (!ids.insert(r.custom_id).second) {
                throw ValidationError("duplicate custom_id '" + r.custom_id + "' in submission");
            }
        }
    }
    const std::size_t workers = std::clamp<std::size_t>(options.parallelism, 1, std::max<std::size_t>(requests.size(), 1));
    const int attempts = std::max(options.max_attempts, 1);
    auto sleep = options.sleep ? options.sleep
                               : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };

    std::vector<LlmResponse> out(requests.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < requests.size(); i = next++) {
            auto backoff = options.base_backoff;
            for (int attempt = 1;; ++attempt) {
                try {
                    out[i] = backend.complete(requests[i]);
                } catch (const std::exception& e) {
                    out[i] = {requests[i].custom_id, "", ResponseStatus::TransportError, e.what()};
                }
                out[i].custom_id = requests[i].custom_id;
                if (out[i].status != ResponseStatus::TransportError || attempt >= attempts) break;
                sleep(std::min(backoff, options.max_backoff));
                backoff *= 2;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace textfeat

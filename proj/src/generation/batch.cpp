#include "textfeat/error.hpp"
#include "textfeat/llm.hpp"
#include "textfeat/text.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace textfeat {

namespace {

void check_unique(std::span<const LlmRequest> requests) {
    std::set<std::string_view> ids;
    for (const auto& r : requests) {
        if (r.custom_id.empty()) throw ValidationError("batch request with empty custom_id");
        if (!ids.insert(r.custom_id).second) {
            throw ValidationError("duplicate custom_id '" + r.custom_id + "' in batch");
        }
    }
}

std::string to_jsonl(std::span<const LlmRequest> requests) {
    std::string out;
    for (const auto& r : requests) {
        out += batch_request_line(r).dump();
        out += '\n';
    }
    return out;
}

}  // namespace

Json batch_request_line(const LlmRequest& request) {
    Json line;
    line["custom_id"] = request.custom_id;
    line["method"] = "POST";
    line["url"] = std::string(kBatchUrl);
    line["body"] = chat_completion_body(request);
    return line;
}

LlmRequest parse_batch_request_line(std::string_view line) {
    const Json doc = parse_json(line, "batch request line");
    if (!doc.is_object() || !doc.contains("custom_id") || !doc.contains("body")) {
        throw ValidationError("batch request line lacks custom_id or body");
    }
    const auto& body = doc["body"];
    LlmRequest req;
    req.custom_id = doc["custom_id"].get<std::string>();
    req.model = body.value("model", "");
    req.temperature = body.value("temperature", 0.0);
    req.top_p = body.value("top_p", 1.0);
    req.deterministic = req.temperature == 0.0;
    for (const auto& m : body.value("messages", Json::array())) {
        req.messages.push_back({m.value("role", ""), m.value("content", "")});
    }
    return req;
}

std::size_t emit_batch_file(std::span<const LlmRequest> requests, const std::filesystem::path& path) {
    check_unique(requests);
    text::write_file(path.string(), to_jsonl(requests));
    return requests.size();
}

std::vector<std::filesystem::path> emit_batch_files(std::span<const LlmRequest> requests,
                                                    const std::filesystem::path& directory,
                                                    std::string_view stem, std::size_t max_per_file) {
    if (max_per_file == 0) throw SettingsError("batch cap must be positive");
    check_unique(requests);
    std::filesystem::create_directories(directory);
    std::vector<std::filesystem::path> files;
    for (std::size_t start = 0, part = 1; start < requests.size(); start += max_per_file, ++part) {
        const auto count = std::min(max_per_file, requests.size() - start);
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "_%03zu.jsonl", part);
        auto path = directory / (std::string(stem) + suffix);
        text::write_file(path.string(), to_jsonl(requests.subspan(start, count)));
        files.push_back(std::move(path));
    }
    return files;
}

std::vector<LlmRequest> read_batch_requests(const std::filesystem::path& path) {
    std::vector<LlmRequest> out;
    std::istringstream in(text::read_file(path.string()));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(parse_batch_request_line(line));
        } catch (const Error& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
        }
    }
    return out;
}

Json batch_result_line(const std::string& custom_id, const std::string& content) {
    Json message;
    message["role"] = "assistant";
    message["content"] = content;
    Json choice;
    choice["index"] = 0;
    choice["message"] = std::move(message);
    choice["finish_reason"] = "stop";
    Json body;
    body["object"] = "chat.completion";
    body["choices"] = Json::array({std::move(choice)});
    Json response;
    response["status_code"] = 200;
    response["body"] = std::move(body);
    Json line;
    line["id"] = "batch_req_" + custom_id;
    line["custom_id"] = custom_id;
    line["response"] = std::move(response);
    line["error"] = nullptr;
    return line;
}

BatchIngest parse_batch_results(std::string_view jsonl) {
    BatchIngest out;
    std::size_t line_no = 0;
    for (const auto& raw : text::split(jsonl, '\n')) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty()) continue;
        if (!Json::accept(line)) {
            out.malformed.push_back({line_no, "invalid JSON"});
            continue;
        }
        const Json doc = Json::parse(line);
        if (!doc.is_object() || !doc.contains("custom_id") || !doc["custom_id"].is_string()) {
            out.malformed.push_back({line_no, "missing custom_id"});
            continue;
        }
        const std::string id = doc["custom_id"].get<std::string>();
        if (doc.contains("error") && !doc["error"].is_null()) {
            const auto& err = doc["error"];
            out.responses.push_back({id, "", ResponseStatus::TransportError,
                                     err.is_object() ? err.value("message", err.dump()) : err.dump()});
            continue;
        }
        const auto resp = doc.find("response");
        if (resp == doc.end() || !resp->is_object() || !resp->contains("body")) {
            out.malformed.push_back({line_no, "missing response body"});
            continue;
        }
        const int status = resp->value("status_code", 200);
        if (status != 200) {
            out.responses.push_back({id, "", ResponseStatus::TransportError,
                                     "status " + std::to_string(status)});
            continue;
        }
        out.responses.push_back(parse_chat_completion(id, (*resp)["body"]));
    }
    return out;
}

BatchIngest ingest_batch_results(const std::filesystem::path& path) {
    return parse_batch_results(text::read_file(path.string()));
}

}  // namespace textfeat

#include "textfeat/json_util.hpp"

#include "textfeat/error.hpp"
#include "textfeat/text.hpp"

namespace textfeat {

std::string strip_markdown_fences(std::string_view raw) {
    auto body = text::trim(raw);
    if (!body.starts_with("```")) return std::string(body);
    const auto first_newline = body.find('\n');
    if (first_newline == std::string_view::npos) return std::string(body);
    body.remove_prefix(first_newline + 1);
    body = text::trim(body);
    if (body.ends_with("```")) body.remove_suffix(3);
    return std::string(text::trim(body));
}

std::optional<std::string> extract_first_json_object(std::string_view raw) {
    const std::string body = strip_markdown_fences(raw);
    for (std::size_t start = body.find('{'); start != std::string::npos;
         start = body.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < body.size(); ++i) {
            const char c = body[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    auto candidate = body.substr(start, i - start + 1);
                    if (Json::accept(candidate)) return candidate;
                    break;
                }
            }
        }
    }
    return std::nullopt;
}

Json parse_json(std::string_view raw, std::string_view what) {
    try {
        return Json::parse(raw.begin(), raw.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string(what) + ": invalid JSON at byte " + std::to_string(e.byte) +
                             " (" + e.what() + ")",
                         e.byte);
    }
}

Json load_json_file(const std::string& path) {
    return parse_json(text::read_file(path), path);
}

void save_json_file(const std::string& path, const Json& value) {
    text::write_file(path, value.dump(2) + "\n");
}

}  // namespace textfeat

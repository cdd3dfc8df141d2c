#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace textfeat {

using Json = nlohmann::ordered_json;

// Removes a surrounding ``` / ```json fence if present.
std::string strip_markdown_fences(std::string_view raw);

// Finds the first balanced {...} object in free text, honoring JSON string
// quoting. Returns nullopt when no balanced object exists.
std::optional<std::string> extract_first_json_object(std::string_view raw);

// Parses JSON, rethrowing nlohmann errors as ParseError with the byte offset.
Json parse_json(std::string_view raw, std::string_view what);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& value);

}  // namespace textfeat

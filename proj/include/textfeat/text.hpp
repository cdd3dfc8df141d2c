#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace textfeat::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char separator);
std::string join(const std::vector<std::string>& parts, std::string_view separator);
std::optional<double> parse_number(std::string_view s);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
// Shortest round-trip decimal form; used wherever output bytes must be stable.
std::string format_double(double value);

}  // namespace textfeat::text

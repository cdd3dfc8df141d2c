#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace textfeat::csv {

using Record = std::vector<std::string>;

// RFC-4180 reader. Throws ParseError carrying the 1-based record number
// (header = 1) on unterminated quotes or ragged rows.
std::vector<Record> parse(std::string_view text);

std::string escape(std::string_view field);
void write_record(std::ostream& out, const Record& fields);

}  // namespace textfeat::csv

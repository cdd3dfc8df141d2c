#include "textfeat/csv.hpp"

#include "textfeat/error.hpp"

#include <ostream>

namespace textfeat::csv {

std::vector<Record> parse(std::string_view text) {
    std::vector<Record> records;
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t record_no = 1;
    std::size_t i = 0;

    auto end_field = [&] {
        current.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (!records.empty() && current.size() != records.front().size()) {
            throw ParseError("csv record " + std::to_string(record_no) + " has " +
                                 std::to_string(current.size()) + " fields, expected " +
                                 std::to_string(records.front().size()),
                             record_no);
        }
        records.push_back(std::move(current));
        current.clear();
        ++record_no;
    };

    while (i < text.size()) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
                continue;
            }
            field.push_back(c);
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                if (field_started) {
                    throw ParseError("csv record " + std::to_string(record_no) +
                                         ": quote inside unquoted field",
                                     record_no);
                }
                in_quotes = true;
                field_started = true;
                ++i;
                break;
            case ',':
                end_field();
                ++i;
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                [[fallthrough]];
            case '\n':
                end_record();
                ++i;
                break;
            default:
                field.push_back(c);
                field_started = true;
                ++i;
        }
    }
    if (in_quotes) {
        throw ParseError("csv record " + std::to_string(record_no) + ": unterminated quoted field",
                         record_no);
    }
    if (field_started || !current.empty()) end_record();
    return records;
}

std::string escape(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_record(std::ostream& out, const Record& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

}  // namespace textfeat::csv

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace persona_lab::ingest {

// CSV dialect: comma separated, fields quoted only when they contain a comma,
// quote, CR or LF; embedded quotes doubled; LF record terminator.

std::string csv_escape(std::string_view field);

/// Splits one physical line. Quoted fields may not span lines.
/// Throws ParseError on an unterminated quote.
std::vector<std::string> split_csv_line(std::string_view line);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace persona_lab::ingest

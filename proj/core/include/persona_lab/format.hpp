#pragma once

#include <string>
#include <string_view>

namespace persona_lab {

// Fixed-point rendering with a fixed number of decimals ("%.Nf").
std::string format_fixed(double value, int decimals);

// Shortest decimal string that parses back to the identical double.
std::string format_shortest(double value);

// Strict full-string parse; throws ParseError on trailing garbage or overflow.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::string to_lower_ascii(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace persona_lab

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nrchain::csv {

// Splits one CSV record. Double quotes delimit fields that may contain the
// delimiter; "" inside a quoted field is a literal quote. Returns nullopt for
// an unterminated quote.
std::optional<std::vector<std::string>> split_line(std::string_view line, char delimiter = ',');

// Quotes a field when it contains the delimiter, a quote, or a line break.
std::string escape_field(std::string_view field, char delimiter = ',');

std::string_view trim(std::string_view s);

// Parses a whole field as a finite double. Leading/trailing blanks allowed.
std::optional<double> parse_double(std::string_view field);

// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace nrchain::csv

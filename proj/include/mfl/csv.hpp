#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mfl::csv {

/// Real formatted with 17 significant digits, '.' decimal separator.
std::string real(double x);

/// Quotes a field when it contains a comma, quote or newline.
std::string field(std::string_view s);

std::string row(const std::vector<std::string>& fields);

std::vector<std::string> split(std::string_view line, char sep = ',');

double parse_real(std::string_view s);

}  // namespace mfl::csv

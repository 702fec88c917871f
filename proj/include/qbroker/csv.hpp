#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qbroker::csv {

/// Shortest decimal form that parses back to the same double ("0.3" stays
/// "0.3"). Infinities print as "inf"/"-inf".
std::string format_double(double value);

/// Parses a double; throws qbroker::IoError with `context` on failure.
double parse_double(std::string_view text, const std::string& context);

/// Parses a nonnegative integer; throws qbroker::IoError on failure.
long long parse_int(std::string_view text, const std::string& context);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

} // namespace qbroker::csv

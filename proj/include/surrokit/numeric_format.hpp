#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace surrokit {

// Shortest decimal string that parses back to exactly the same double.
// Locale independent.
std::string format_double(double value);
void append_double(std::string& out, double value);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

}  // namespace surrokit

#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace hsi {

/// Shortest decimal form that parses back to the same double ("0.15", not
/// "1.4999999999999999e-01"). Locale-independent.
std::string format_double(double v);

/// Fixed N-decimal form for console output.
std::string format_fixed(double v, int decimals);

/// Parses a double; throws hsi::Error mentioning `what` on garbage or
/// trailing junk.
double parse_double(std::string_view text, std::string_view what);

/// Parses a nonnegative integer; same error behaviour.
std::size_t parse_size(std::string_view text, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string lower(std::string_view s);

} // namespace hsi

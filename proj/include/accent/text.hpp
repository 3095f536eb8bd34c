#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace accent {

/// Shortest decimal form with at most 17 significant digits; parses back to
/// the identical double.
std::string format_double(double value);
/// Fixed 17 significant digits (`%.17g`), used for data files.
std::string format_double17(double value);

double parse_double(std::string_view text, std::string_view what);
int parse_int(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

/// `key=value` lines in order of appearance; blank lines and lines starting
/// with '#' are skipped.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

}  // namespace accent

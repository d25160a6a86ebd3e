#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mortgeom::text {

/// 17 significant digits, locale-independent; parses back bit-exactly.
std::string format_double(double value);

/// Full-string numeric parse (decimal or scientific); nullopt on any junk.
std::optional<double> parse_double(std::string_view token);
std::optional<long> parse_long(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view line);
std::vector<std::string_view> split(std::string_view line, char delim);
/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> lines(std::string_view text);

}  // namespace mortgeom::text

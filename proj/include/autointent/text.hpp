#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace autointent::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
/// Splits on `sep`, dropping empty pieces.
std::vector<std::string> split_on(std::string_view s, char sep);
bool starts_with_icase(std::string_view s, std::string_view prefix);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Truncates to at most `max_chars` bytes without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string_view s, std::size_t max_chars);

/// Replaces every `{name}` in `tmpl` with `values.at(name)`. Unknown
/// placeholders throw ConfigError; `{{` and `}}` escape literal braces.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// 64-bit FNV-1a, stable across platforms.
std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

}  // namespace autointent::text

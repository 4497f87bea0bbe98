#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vtsql {

std::string_view trim_view(std::string_view s);
std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::size_t edit_distance(std::string_view a, std::string_view b);

// SQL single-quoted literal with '' escaping.
std::string sql_quote(std::string_view s);

// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace vtsql

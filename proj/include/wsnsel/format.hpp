#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wsnsel {

// Shortest representation that round-trips through strtod.
std::string format_double(double value);

// Fixed number of decimals, for human-readable output.
std::string format_fixed(double value, int decimals);

std::string join_ids(const std::vector<int>& ids, std::string_view sep);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

// Writes to a sibling temp file, then renames over the destination.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace wsnsel

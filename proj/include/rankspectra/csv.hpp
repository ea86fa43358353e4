#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rankspectra {

/// Shortest decimal form that round-trips the double.
std::string format_double(double v);

/// Joins fields with commas, quoting those that need it.
std::string csv_row(const std::vector<std::string>& fields);

/// Splits one CSV line; handles double-quoted fields.
std::vector<std::string> csv_split(std::string_view line);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace rankspectra

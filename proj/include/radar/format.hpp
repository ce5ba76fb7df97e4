#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace radar {

/// Shortest representation that round-trips; "nan" for NaN.
std::string format_double(double value);

/// Quotes a CSV field when it contains a separator, quote or newline.
std::string csv_field(std::string_view text);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

/// Writes via a temporary sibling file and rename, so readers never observe
/// a partially written output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

} // namespace radar

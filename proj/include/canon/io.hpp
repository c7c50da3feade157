#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace canon::io {

/// Reads a whole file as bytes. Throws Error{MissingFile} or Error{IoError}.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// True if `bytes` is well-formed UTF-8 (no overlongs, no surrogates).
bool is_valid_utf8(std::string_view bytes) noexcept;

/// 64-bit FNV-1a. Used for cache keys, not for security.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xCBF29CE484222325ULL) noexcept;
std::string hex64(std::uint64_t value);

/// Shortest decimal that round-trips the double exactly.
std::string format_double(double value);
/// Fixed 17-significant-digit rendering (%.17g).
std::string format_double17(double value);

/// Quotes a CSV field if it contains a comma, quote or newline.
std::string csv_field(std::string_view field);
/// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace canon::io

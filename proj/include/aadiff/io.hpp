#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace aadiff::io {

using Bytes = std::vector<std::uint8_t>;

Bytes read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
void write_file_atomic(const std::filesystem::path& path, const Bytes& contents);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace aadiff::io

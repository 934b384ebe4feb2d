#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aegis::util {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Case-folded alphanumeric tokenization; every non-alphanumeric byte is a
/// separator. "ASIL-D, brake!" -> {"asil", "d", "brake"}.
std::vector<std::string> tokenize(std::string_view text);

/// Byte offset of each UTF-8 code point start, plus one trailing entry equal
/// to text.size(). Invalid bytes are treated as one code point each.
std::vector<std::size_t> utf8_offsets(std::string_view text);

/// Number of UTF-8 code points in text.
std::size_t utf8_length(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
/// Write to a sibling temp file and rename over the target.
void write_file_atomic(const std::string& path, std::string_view content);

/// Current time as ISO-8601 UTC, e.g. "2026-08-19T10:33:00Z".
std::string iso8601_now();

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Split into lines; both "\n" and "\r\n" terminate a line.
std::vector<std::string> split_lines(std::string_view text);

bool starts_with(std::string_view s, std::string_view prefix);
bool contains(std::string_view s, std::string_view needle);

/// Fixed-precision decimal formatting ("%.4f" style).
std::string format_fixed(double value, int precision);

/// Deterministic uniform integer in [0, bound) drawn from a caller-owned
/// 64-bit state via splitmix64. Identical across platforms, unlike the
/// standard distributions.
std::uint64_t next_bounded(std::uint64_t& state, std::uint64_t bound);

}  // namespace aegis::util

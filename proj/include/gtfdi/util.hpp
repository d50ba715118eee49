#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gtfdi {

inline constexpr const char* kVersion = "0.1.0";

// fixed 6-decimal formatting used by every CSV writer
std::string fmt6(double v);

std::vector<std::string> split(std::string_view line, char sep);
std::string trim(std::string_view s);

// strict double / long parsing; throws std::invalid_argument on garbage
double parse_double(std::string_view s);
long parse_long(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a over raw bytes; used for model payload and dataset checksums
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string to_hex(std::uint64_t v);

}  // namespace gtfdi

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace kgatt {

/// Shortest round-trip decimal representation.
std::string format_double(double v);
double parse_double(std::string_view text);
std::size_t parse_size(std::string_view text);

std::vector<std::string_view> split_fields(std::string_view line, char sep);

/// Reads one line, stripping a trailing '\r'. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

/// Opens `path` for writing, creating parent directories; throws on failure.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

/// 64-bit FNV-1a over raw bytes, rendered as 16 hex digits.
class Fingerprint {
 public:
  void add(const void* data, std::size_t bytes);
  void add(std::string_view s) { add(s.data(), s.size()); }
  void add(const std::vector<double>& v) { add(v.data(), v.size() * sizeof(double)); }
  std::string hex() const;

 private:
  std::uint64_t state_ = 1469598103934665603ULL;
};

}  // namespace kgatt

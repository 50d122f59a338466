#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fairgen {

/// Formats a floating value with 9 significant digits, the precision used by
/// every text file this project emits.
std::string format_g9(double v);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

long long parse_int(std::string_view s, std::string_view what);
double parse_double(std::string_view s, std::string_view what);

/// Ordered key=value file. Blank lines and lines starting with '#' are
/// skipped; duplicate keys are rejected.
class KeyValueFile {
 public:
  static KeyValueFile read(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  const std::string& get(std::string_view key) const;  // throws if missing
  std::string get_or(std::string_view key, std::string fallback) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  const std::string& source() const { return source_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string source_;
};

void write_text_file(const std::filesystem::path& path, std::string_view body);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace fairgen

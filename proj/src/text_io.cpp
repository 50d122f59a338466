#include "fairgen/text_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fairgen {

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

long long parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  std::string tmp(s);
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(tmp.c_str(), &end, 10);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || errno == ERANGE)
    throw std::runtime_error("expected integer for " + std::string(what) +
                             ", got '" + tmp + "'");
  return v;
}

double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  std::string tmp(s);
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || errno == ERANGE)
    throw std::runtime_error("expected number for " + std::string(what) +
                             ", got '" + tmp + "'");
  return v;
}

KeyValueFile KeyValueFile::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  KeyValueFile kv;
  kv.source_ = path.string();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#')
      continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected key=value, got '" + std::string(sv) + "'");
    std::string key(trim(sv.substr(0, eq)));
    std::string value(trim(sv.substr(eq + 1)));
    if (key.empty())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": empty key");
    if (kv.has(key))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": duplicate key '" + key + "'");
    kv.entries_.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

bool KeyValueFile::has(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key)
      return true;
  return false;
}

const std::string& KeyValueFile::get(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key)
      return v;
  throw std::runtime_error(source_ + ": missing required key '" +
                           std::string(key) + "'");
}

std::string KeyValueFile::get_or(std::string_view key, std::string fallback) const {
  for (const auto& [k, v] : entries_)
    if (k == key)
      return v;
  return fallback;
}

void write_text_file(const std::filesystem::path& path, std::string_view body) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << body;
  if (!out)
    throw std::runtime_error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fairgen

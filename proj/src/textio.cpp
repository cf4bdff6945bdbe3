#include "isa/textio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace isa {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  double out = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last || token.empty()) {
    throw UsageError("not a number: '" + token + "'");
  }
  return out;
}

long long parse_int(const std::string& token) {
  long long out = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last || token.empty()) {
    throw UsageError("not an integer: '" + token + "'");
  }
  return out;
}

KvConfig KvConfig::parse_text(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    KvEntry entry;
    entry.key = trim(line.substr(0, eq));
    entry.value = trim(line.substr(eq + 1));
    entry.line = line_no;
    if (entry.key.empty()) {
      throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    }
    for (const auto& prev : cfg.entries_) {
      if (prev.key == entry.key) {
        throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" +
                         entry.key + "'");
      }
    }
    cfg.entries_.push_back(std::move(entry));
  }
  return cfg;
}

KvConfig KvConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

bool KvConfig::has(const std::string& key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return true;
  }
  return false;
}

const std::string& KvConfig::get(const std::string& key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return e.value;
  }
  throw UsageError("missing config key '" + key + "'");
}

std::string KvConfig::get_or(const std::string& key, std::string fallback) const {
  for (const auto& e : entries_) {
    if (e.key == key) return e.value;
  }
  return fallback;
}

void KvConfig::require_known(const std::vector<std::string>& known_keys) const {
  for (const auto& e : entries_) {
    bool found = false;
    for (const auto& k : known_keys) {
      if (e.key == k) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw UsageError("unknown config key '" + e.key + "' (line " + std::to_string(e.line) + ")");
    }
  }
}

}  // namespace isa

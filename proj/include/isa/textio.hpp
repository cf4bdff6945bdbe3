#pragma once

#include <string>
#include <vector>

#include "isa/types.hpp"

namespace isa {

// shortest decimal that parses back to the same double
std::string format_double(double v);

// strict full-token parses; anything else is a usage error
double parse_double(const std::string& token);
long long parse_int(const std::string& token);

struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// flat "key = value" text, '#' starts a comment, order preserved
class KvConfig {
 public:
  static KvConfig parse_text(const std::string& text);
  static KvConfig load_file(const std::string& path);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  const std::vector<KvEntry>& entries() const { return entries_; }

  // strays are configuration typos, surface them loudly
  void require_known(const std::vector<std::string>& known_keys) const;

 private:
  std::vector<KvEntry> entries_;
};

}  // namespace isa

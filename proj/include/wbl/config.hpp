#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace wbl {

struct ConfigEntry {
  std::string value;
  int line = 0;    // 0 for values that did not come from a file
  int column = 0;  // of the value's first character
  int key_column = 0;
};

/// `[section]` headers, `key = value` lines, `#` comments. Keys outside any
/// section land in the section named "" and are rejected by validate().
class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text, const std::string& source = "<config>");
  static ConfigDocument load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  const std::map<std::string, std::map<std::string, ConfigEntry>>& sections() const { return sections_; }

  void set(const std::string& section, const std::string& key, const std::string& value);
  /// Applies `key=value` strings to the given section. Throws ConfigParse.
  void apply_overrides(const std::string& section, const std::vector<std::string>& overrides);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// Comma- or whitespace-separated numbers.
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;

  /// Throws ConfigParse at the first key of `section` not in `allowed`, at
  /// keys outside any section, and at sections not in `known_sections`.
  /// Other known sections are ignored so one file can serve several subcommands.
  void validate(const std::string& section, const std::set<std::string>& allowed,
                const std::set<std::string>& known_sections) const;

  /// Canonical `[section]\nkey = value` text, sorted; used for hashing.
  std::string canonical() const;

 private:
  [[noreturn]] void fail(const ConfigEntry& at, const std::string& what) const;
  const ConfigEntry* find(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
};

}  // namespace wbl

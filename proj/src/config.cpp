#include "wbl/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "wbl/error.hpp"

namespace wbl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') return false;
  }
  return true;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

void ConfigDocument::fail(const ConfigEntry& at, const std::string& what) const {
  std::ostringstream os;
  if (at.line > 0) {
    os << source_ << ":" << at.line << ":" << at.column << ": ";
  } else if (!source_.empty()) {
    os << source_ << ": ";
  }
  os << what;
  throw Error(ErrorCode::ConfigParse, os.str());
}

ConfigDocument ConfigDocument::parse(std::string_view text, const std::string& source) {
  ConfigDocument doc;
  doc.source_ = source;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') doc.fail({"", line_no, indent}, "unterminated section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!valid_name(name)) doc.fail({"", line_no, indent + 1}, "invalid section name");
      section = std::string(name);
      doc.sections_[section];
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) doc.fail({"", line_no, indent}, "expected key = value");
      const std::string_view key = trim(line.substr(0, eq));
      if (!valid_name(key)) doc.fail({"", line_no, indent}, "invalid key");
      const std::string_view value = trim(line.substr(eq + 1));
      const std::size_t value_offset = value.empty() ? eq + 1 : line.find(value, eq + 1);
      auto& entries = doc.sections_[section];
      const std::string k(key);
      if (entries.count(k)) doc.fail({"", line_no, indent}, "duplicate key '" + k + "'");
      entries[k] = ConfigEntry{std::string(value), line_no, indent + static_cast<int>(value_offset), indent};
    }
    if (end == text.size()) break;
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void ConfigDocument::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = ConfigEntry{value, 0, 0, 0};
}

void ConfigDocument::apply_overrides(const std::string& section,
                                     const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    const std::string_view key = eq == std::string::npos ? std::string_view{} : trim(std::string_view(item).substr(0, eq));
    if (eq == std::string::npos || !valid_name(key)) {
      throw Error(ErrorCode::ConfigParse, "override '" + item + "' is not key=value");
    }
    set(section, std::string(key), std::string(trim(std::string_view(item).substr(eq + 1))));
  }
}

const ConfigEntry* ConfigDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto e = s->second.find(key);
  return e == s->second.end() ? nullptr : &e->second;
}

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigDocument::get_string(const std::string& section, const std::string& key,
                                       const std::string& fallback) const {
  const ConfigEntry* e = find(section, key);
  return e ? e->value : fallback;
}

double ConfigDocument::get_double(const std::string& section, const std::string& key,
                                  double fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) return fallback;
  double v = 0.0;
  if (!parse_double(e->value, v)) fail(*e, "'" + key + "' expects a number, got '" + e->value + "'");
  return v;
}

int ConfigDocument::get_int(const std::string& section, const std::string& key, int fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) return fallback;
  const std::string_view s = trim(e->value);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(*e, "'" + key + "' expects an integer, got '" + e->value + "'");
  }
  return v;
}

bool ConfigDocument::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) return fallback;
  const std::string_view s = trim(e->value);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail(*e, "'" + key + "' expects true or false, got '" + e->value + "'");
}

std::vector<double> ConfigDocument::get_list(const std::string& section, const std::string& key,
                                             const std::vector<double>& fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    double v = 0.0;
    if (!parse_double(token, v)) fail(*e, "'" + key + "' has a non-numeric item '" + token + "'");
    out.push_back(v);
    token.clear();
  };
  for (char c : e->value) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  if (out.empty()) fail(*e, "'" + key + "' is an empty list");
  return out;
}

void ConfigDocument::validate(const std::string& section, const std::set<std::string>& allowed,
                              const std::set<std::string>& known_sections) const {
  for (const auto& [name, entries] : sections_) {
    const ConfigEntry at = entries.empty() ? ConfigEntry{} : entries.begin()->second;
    if (name.empty()) {
      if (!entries.empty()) fail({"", at.line, at.key_column}, "key outside any section");
      continue;
    }
    if (name != section) {
      if (!known_sections.count(name)) fail({"", at.line, at.key_column}, "unknown section [" + name + "]");
      continue;
    }
    // Report the unknown key that appears first in the file.
    const std::pair<const std::string, ConfigEntry>* first = nullptr;
    for (const auto& item : entries) {
      if (allowed.count(item.first)) continue;
      if (!first || item.second.line < first->second.line) first = &item;
    }
    if (first) {
      fail({"", first->second.line, first->second.key_column},
           "unknown key '" + first->first + "' in [" + section + "]");
    }
  }
}

std::string ConfigDocument::canonical() const {
  std::ostringstream os;
  for (const auto& [name, entries] : sections_) {
    os << "[" << name << "]\n";
    for (const auto& [key, entry] : entries) os << key << " = " << entry.value << "\n";
  }
  return os.str();
}

}  // namespace wbl

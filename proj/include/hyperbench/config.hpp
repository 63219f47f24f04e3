#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hyperbench/csv.hpp"
#include "hyperbench/errors.hpp"

// Flat key=value configuration text with bracketed section headers.
// Insertion order is preserved for canonical serialization; consumers must
// consume every key they accept so that unknown keys can be rejected.

namespace hyperbench {

class Config {
 public:
  struct Entry {
    std::string key;
    std::string value;
    mutable bool consumed = false;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };

  static Config parse(const std::string& text) {
    Config cfg;
    Section* current = nullptr;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
      pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
      ++lineno;

      std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
        std::string name = trim(t.substr(1, t.size() - 2));
        if (name.empty())
          throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
        cfg.sections_.push_back(Section{name, {}});
        current = &cfg.sections_.back();
        continue;
      }
      std::size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      if (!current)
        throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      for (const Entry& e : current->entries)
        if (e.key == key)
          throw ConfigError("duplicate key '" + key + "' in section [" + current->name + "]");
      current->entries.push_back(Entry{key, value});
    }
    return cfg;
  }

  const std::vector<Section>& sections() const { return sections_; }

  bool has_section(const std::string& name) const { return find(name) != nullptr; }

  std::vector<const Section*> sections_named(const std::string& prefix) const {
    std::vector<const Section*> out;
    for (const Section& s : sections_)
      if (s.name == prefix ||
          (s.name.size() > prefix.size() && s.name.compare(0, prefix.size(), prefix) == 0 &&
           s.name[prefix.size()] == '.'))
        out.push_back(&s);
    return out;
  }

  const std::string* get(const std::string& section, const std::string& key) const {
    const Section* s = find(section);
    if (!s) return nullptr;
    return get(*s, key);
  }

  static const std::string* get(const Section& s, const std::string& key) {
    for (const Entry& e : s.entries)
      if (e.key == key) {
        e.consumed = true;
        return &e.value;
      }
    return nullptr;
  }

  std::string require(const std::string& section, const std::string& key) const {
    const std::string* v = get(section, key);
    if (!v) throw ConfigError("missing key '" + key + "' in section [" + section + "]");
    return *v;
  }

  static std::string require(const Section& s, const std::string& key) {
    const std::string* v = get(s, key);
    if (!v) throw ConfigError("missing key '" + key + "' in section [" + s.name + "]");
    return *v;
  }

  void mark_section_known(const std::string& name) const { known_sections_.insert(name); }

  // Every key must have been consumed and every section visited; anything
  // left over is an error, not a warning.
  void reject_unknown() const {
    for (const Section& s : sections_) {
      if (!known_sections_.count(s.name))
        throw ConfigError("unknown section [" + s.name + "]");
      for (const Entry& e : s.entries)
        if (!e.consumed)
          throw ConfigError("unknown key '" + e.key + "' in section [" + s.name + "]");
    }
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  const Section* find(const std::string& name) const {
    for (const Section& s : sections_) {
      if (s.name == name) {
        known_sections_.insert(name);
        return &s;
      }
    }
    return nullptr;
  }

  std::vector<Section> sections_;
  mutable std::set<std::string> known_sections_;
};

class ConfigWriter {
 public:
  void section(const std::string& name) { out_ += "[" + name + "]\n"; }
  void kv(const std::string& key, const std::string& value) { out_ += key + " = " + value + "\n"; }
  void kv(const std::string& key, double value) { kv(key, fmt17(value)); }
  void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
  void blank() { out_ += "\n"; }
  const std::string& text() const { return out_; }

 private:
  std::string out_;
};

}  // namespace hyperbench

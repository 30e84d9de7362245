#ifndef HOMMB_CONFIG_HPP
#define HOMMB_CONFIG_HPP

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "hommb/errors.hpp"

namespace hommb {

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

} // namespace detail

/// One parsed value with the line it came from, so schema errors can point
/// at the offending line.
struct ConfigValue {
  std::string m_value;
  int m_line = 0;
};

/// Strict INI-style configuration:
///   [section]
///   key = value        # comment
/// Unknown sections or keys, duplicate keys, and malformed lines are all
/// hard errors with line numbers. Keys must live inside a section.
class Config {
public:
  using Section = std::map<std::string, ConfigValue>;

  static Config parse(std::istream& in) {
    Config c;
    std::string line, section;
    int sectionLine = 0;
    int lineNo = 0;
    while (std::getline(in, line)) {
      ++lineNo;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t[0] == '[') {
        const size_t close = t.find(']');
        if (close == std::string::npos)
          throw ValidationError(where(lineNo) + "unterminated section header");
        if (!detail::trim(t.substr(close + 1)).empty())
          throw ValidationError(where(lineNo) + "text after section header");
        section = detail::trim(t.substr(1, close - 1));
        if (section.empty())
          throw ValidationError(where(lineNo) + "empty section name");
        if (c.m_sections.count(section))
          throw ValidationError(where(lineNo) + "duplicate section [" + section + "]");
        c.m_sections[section] = Section();
        sectionLine = lineNo;
        (void)sectionLine;
        continue;
      }
      const size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw ValidationError(where(lineNo) + "expected key = value");
      const std::string key = detail::trim(t.substr(0, eq));
      std::string value = detail::trim(t.substr(eq + 1));
      // strip a trailing comment that is separated by whitespace
      for (size_t i = 1; i < value.size(); ++i) {
        if ((value[i] == '#' || value[i] == ';') &&
            std::isspace(static_cast<unsigned char>(value[i - 1]))) {
          value = detail::trim(value.substr(0, i));
          break;
        }
      }
      if (key.empty())
        throw ValidationError(where(lineNo) + "empty key");
      if (section.empty())
        throw ValidationError(where(lineNo) + "key '" + key +
                              "' appears before any [section]");
      Section& sec = c.m_sections[section];
      if (sec.count(key))
        throw ValidationError(where(lineNo) + "duplicate key '" + key +
                              "' in [" + section + "] (first on line " +
                              std::to_string(sec[key].m_line) + ")");
      sec[key] = ConfigValue{value, lineNo};
    }
    return c;
  }

  static Config parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
      throw ValidationError("cannot open config file '" + path + "'");
    return parse(in);
  }

  const std::map<std::string, Section>& sections() const { return m_sections; }

  bool has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
  }

  const ConfigValue* find(const std::string& section, const std::string& key) const {
    const auto s = m_sections.find(section);
    if (s == m_sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  std::string get_string(const std::string& section, const std::string& key) const {
    const ConfigValue* v = find(section, key);
    if (!v)
      throw ValidationError("config is missing required key '" + key +
                            "' in [" + section + "]");
    return v->m_value;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? v->m_value : fallback;
  }

  long get_int(const std::string& section, const std::string& key) const {
    return to_int(section, key, *required(section, key));
  }

  long get_int(const std::string& section, const std::string& key, long fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? to_int(section, key, *v) : fallback;
  }

  double get_double(const std::string& section, const std::string& key) const {
    return to_double(section, key, *required(section, key));
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? to_double(section, key, *v) : fallback;
  }

  bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const ConfigValue* v = find(section, key);
    if (!v) return fallback;
    const std::string& s = v->m_value;
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ValidationError(where(v->m_line) + "key '" + key + "' in [" + section +
                          "] wants a boolean, got '" + s + "'");
  }

  /// Reject any key the schema does not list. Sections absent from the
  /// schema are unknown as a whole.
  void require_known(const std::map<std::string, std::set<std::string>>& allowed) const {
    for (const auto& [name, sec] : m_sections) {
      const auto it = allowed.find(name);
      if (it == allowed.end()) {
        const int line = sec.empty() ? 0 : sec.begin()->second.m_line;
        throw ValidationError(where(line) + "unknown section [" + name + "]");
      }
      for (const auto& [key, val] : sec) {
        if (!it->second.count(key))
          throw ValidationError(where(val.m_line) + "unknown key '" + key +
                                "' in [" + name + "]");
      }
    }
  }

private:
  static std::string where(int line) {
    return "config line " + std::to_string(line) + ": ";
  }

  const ConfigValue* required(const std::string& section, const std::string& key) const {
    const ConfigValue* v = find(section, key);
    if (!v)
      throw ValidationError("config is missing required key '" + key +
                            "' in [" + section + "]");
    return v;
  }

  long to_int(const std::string& section, const std::string& key,
              const ConfigValue& v) const {
    char* end = nullptr;
    const long out = std::strtol(v.m_value.c_str(), &end, 10);
    if (v.m_value.empty() || end == nullptr || *end != '\0')
      throw ValidationError(where(v.m_line) + "key '" + key + "' in [" + section +
                            "] wants an integer, got '" + v.m_value + "'");
    return out;
  }

  double to_double(const std::string& section, const std::string& key,
                   const ConfigValue& v) const {
    char* end = nullptr;
    const double out = std::strtod(v.m_value.c_str(), &end);
    if (v.m_value.empty() || end == nullptr || *end != '\0')
      throw ValidationError(where(v.m_line) + "key '" + key + "' in [" + section +
                            "] wants a number, got '" + v.m_value + "'");
    return out;
  }

  std::map<std::string, Section> m_sections;
};

/// Grid sizes are powers of two, at least 8: every geometry builder wants
/// n >= 8, seam-conforming refinement doubles n, and the X-point blend
/// shell sits on the n/8 lattice row.
inline void validate_grid_n(long n) {
  if (n < 8 || (n & (n - 1)) != 0)
    throw ValidationError("grid size n must be a power of two >= 8, got " +
                          std::to_string(n));
}

} // namespace hommb

#endif

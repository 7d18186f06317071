#ifndef PEDFLOW_CONFIG_HPP
#define PEDFLOW_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pedflow {

/// `[section]` headers and `key = value` lines. `#` and `;` start comments.
/// Keys outside any section, duplicate keys and malformed lines raise
/// ParseError. Typed getters raise ConfigError naming section.key.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };

  static IniDocument parse(std::istream& in);
  static IniDocument parse_file(const std::string& path);

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }
  bool has(const std::string& section, const std::string& key) const;
  std::vector<std::string> section_names() const;
  const std::map<std::string, Entry>& section(const std::string& name) const;

  /// Throws ConfigError for any section or key not in `allowed`.
  void require_known(const std::map<std::string, std::set<std::string>>& allowed) const;

  std::optional<std::string> get_string(const std::string& section, const std::string& key) const;
  std::optional<double> get_double(const std::string& section, const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& section, const std::string& key) const;
  std::optional<std::uint64_t> get_uint(const std::string& section, const std::string& key) const;
  /// Comma-separated reals, e.g. `0,0,12,32`.
  std::optional<std::vector<double>> get_doubles(const std::string& section,
                                                 const std::string& key) const;

 private:
  const Entry* find(const std::string& section, const std::string& key) const;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

}  // namespace pedflow

#endif  // PEDFLOW_CONFIG_HPP

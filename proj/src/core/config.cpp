#include "pedflow/config.hpp"

#include <fstream>
#include <istream>

#include "pedflow/errors.hpp"
#include "pedflow/text.hpp"

namespace pedflow {

IniDocument IniDocument::parse(std::istream& in) {
  IniDocument doc;
  std::string line;
  std::string current;
  bool in_section = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = text::trim(line);
    if (const auto hash = body.find_first_of("#;"); hash != std::string_view::npos) {
      body = text::trim(body.substr(0, hash));
    }
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError("unterminated section header", line_no);
      current = std::string(text::trim(body.substr(1, body.size() - 2)));
      if (current.empty()) throw ParseError("empty section name", line_no);
      doc.sections_[current];
      in_section = true;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    if (!in_section) throw ParseError("key outside of any [section]", line_no);
    const std::string key(text::trim(body.substr(0, eq)));
    if (key.empty()) throw ParseError("empty key", line_no);
    auto& sec = doc.sections_[current];
    if (sec.count(key)) throw ParseError("duplicate key " + current + "." + key, line_no);
    sec[key] = Entry{std::string(text::trim(body.substr(eq + 1))), line_no};
  }
  return doc;
}

IniDocument IniDocument::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse(in);
}

bool IniDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::vector<std::string> IniDocument::section_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : sections_) out.push_back(name);
  return out;
}

const std::map<std::string, IniDocument::Entry>& IniDocument::section(const std::string& name) const {
  static const std::map<std::string, Entry> empty;
  const auto it = sections_.find(name);
  return it == sections_.end() ? empty : it->second;
}

void IniDocument::require_known(const std::map<std::string, std::set<std::string>>& allowed) const {
  for (const auto& [name, entries] : sections_) {
    const auto sec = allowed.find(name);
    if (sec == allowed.end()) throw ConfigError("unknown section [" + name + "]");
    for (const auto& [key, entry] : entries) {
      if (!sec->second.count(key)) {
        throw ConfigError("unknown key " + name + "." + key + " (line " +
                          std::to_string(entry.line) + ")");
      }
    }
  }
}

const IniDocument::Entry* IniDocument::find(const std::string& section, const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return nullptr;
  const auto it = sec->second.find(key);
  return it == sec->second.end() ? nullptr : &it->second;
}

std::optional<std::string> IniDocument::get_string(const std::string& section,
                                                   const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return e->value;
}

namespace {
template <typename T>
T checked(std::optional<T> v, const std::string& section, const std::string& key,
          const char* kind) {
  if (!v) throw ConfigError("key " + section + "." + key + " is not a valid " + kind);
  return *v;
}
}  // namespace

std::optional<double> IniDocument::get_double(const std::string& section,
                                              const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return checked(text::parse_double(e->value), section, key, "number");
}

std::optional<std::int64_t> IniDocument::get_int(const std::string& section,
                                                 const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return checked(text::parse_int(e->value), section, key, "integer");
}

std::optional<std::uint64_t> IniDocument::get_uint(const std::string& section,
                                                   const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return checked(text::parse_uint(e->value), section, key, "unsigned integer");
}

std::optional<std::vector<double>> IniDocument::get_doubles(const std::string& section,
                                                            const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  std::vector<double> out;
  for (const auto piece : text::split(e->value, ',')) {
    out.push_back(checked(text::parse_double(piece), section, key, "list of numbers"));
  }
  return out;
}

}  // namespace pedflow

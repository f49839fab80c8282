#include "ssde/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ssde {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

double to_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  return v;
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& origin) {
  Config cfg;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto where = origin + ":" + std::to_string(line_no);

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_name(name)) throw ConfigError(where + ": bad section name");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!valid_name(key)) throw ConfigError(where + ": bad key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + std::string(key) + "'");
    if (cfg.sections_[section].count(std::string(key)))
      throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
    cfg.sections_[section][std::string(key)] = std::string(value);
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), file.string());
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!valid_name(key)) throw ConfigError("bad key '" + key + "'");
  sections_[section][key] = value;
}

const std::string* Config::find(const std::string& section, const std::string& key) const {
  for (const std::string& s : {section, std::string()}) {
    const auto sec = sections_.find(s);
    if (sec == sections_.end()) continue;
    const auto it = sec->second.find(key);
    if (it != sec->second.end()) return &it->second;
  }
  return nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
  const auto* v = find(section, key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const auto* v = find(section, key);
  return v ? to_double(*v, key) : fallback;
}

std::uint64_t Config::get_uint(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  const auto* v = find(section, key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end) {
    // Accept integral reals such as 1e5.
    const double d = to_double(*v, key);
    if (!(d >= 0.0 && d < 1.8e19) || d != static_cast<double>(static_cast<std::uint64_t>(d)))
      throw ConfigError("key '" + key + "': '" + *v + "' is not a nonnegative integer");
    return static_cast<std::uint64_t>(d);
  }
  return out;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  const auto* v = find(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  std::string_view rest = *v;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (item.empty()) throw ConfigError("key '" + key + "': empty list entry");
    out.push_back(to_double(std::string(item), key));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

}  // namespace ssde

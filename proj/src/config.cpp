#include "nulldist/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nulldist {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"model", {}},  // name plus model parameters, validated by the catalog
      {"points", {"p", "q", "pair", "random_pairs", "random_lo", "random_hi"}},
      {"lattice",
       {"delta", "levels", "stencil", "region_pad", "axis_pad", "region_lo", "region_hi", "conv_tol",
        "node_cap", "exact_endpoints", "probe_level", "probe_factors", "probe_axes"}},
      {"tolerances", {"rhat", "expect_min", "expect_max"}},
      {"witness", {"kind", "k", "s", "n", "t_p", "x_p", "t_q", "x_q", "y_p", "y_q", "gamma"}},
      {"probe",
       {"kind", "base", "direction", "horizon", "eps", "h_scale", "region_lo", "region_hi", "samples",
        "tau2", "seq_base", "seq_step", "seq_count", "segments_per_unit"}},
      {"run", {"seed", "out", "threads"}},
  };
  return s;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Error config_error(const std::string& what) { return Error(Errc::Config, what); }

}  // namespace

double parse_real(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "pi") return 3.14159265358979323846;
  if (s == "-pi") return -3.14159265358979323846;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw config_error("not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& raw) {
  std::string s = trim(raw);
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s = s.substr(2);
    base = 16;
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw config_error("not an unsigned integer: '" + raw + "'");
  return v;
}

Vec parse_point(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.empty() || parts.size() > std::size_t(kMaxDim))
    throw config_error("bad point '" + s + "'");
  Vec v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_real(parts[i]);
  return v;
}

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::istringstream is(text);
  std::string line, current;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw config_error(where + "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (!schema().count(current)) throw config_error(where + "unknown section [" + current + "]");
      cfg.sections_[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error(where + "expected key = value");
    if (current.empty()) throw config_error(where + "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error(where + "empty key");
    const auto& allowed = schema().at(current);
    if (current != "model" && !allowed.count(key))
      throw config_error(where + "unknown key '" + key + "' in [" + current + "]");
    cfg.sections_[current][key].push_back(value);
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const ConfigFile::Section* ConfigFile::section(const std::string& name) const {
  auto it = sections_.find(name);
  return it == sections_.end() ? nullptr : &it->second;
}

bool ConfigFile::has(const std::string& sec, const std::string& key) const {
  const Section* s = section(sec);
  return s && s->count(key);
}

std::optional<std::string> ConfigFile::str(const std::string& sec, const std::string& key) const {
  const Section* s = section(sec);
  if (!s) return std::nullopt;
  auto it = s->find(key);
  if (it == s->end()) return std::nullopt;
  if (it->second.size() > 1) throw config_error("key '" + key + "' given more than once in [" + sec + "]");
  return it->second.front();
}

std::optional<double> ConfigFile::real(const std::string& sec, const std::string& key) const {
  auto s = str(sec, key);
  if (!s) return std::nullopt;
  return parse_real(*s);
}

std::optional<long> ConfigFile::integer(const std::string& sec, const std::string& key) const {
  auto v = real(sec, key);
  if (!v) return std::nullopt;
  if (*v != std::floor(*v) || std::abs(*v) > 9e15)
    throw config_error("'" + key + "' in [" + sec + "] must be an integer");
  return static_cast<long>(*v);
}

std::optional<bool> ConfigFile::boolean(const std::string& sec, const std::string& key) const {
  auto s = str(sec, key);
  if (!s) return std::nullopt;
  if (*s == "true" || *s == "1") return true;
  if (*s == "false" || *s == "0") return false;
  throw config_error("'" + key + "' in [" + sec + "] must be true or false");
}

std::optional<std::uint64_t> ConfigFile::u64(const std::string& sec, const std::string& key) const {
  auto s = str(sec, key);
  if (!s) return std::nullopt;
  return parse_u64(*s);
}

std::optional<std::vector<double>> ConfigFile::reals(const std::string& sec, const std::string& key) const {
  auto s = str(sec, key);
  if (!s) return std::nullopt;
  std::vector<double> out;
  for (const std::string& part : split(*s, ',')) out.push_back(parse_real(part));
  return out;
}

std::optional<Vec> ConfigFile::point(const std::string& sec, const std::string& key) const {
  auto s = str(sec, key);
  if (!s) return std::nullopt;
  return parse_point(*s);
}

std::vector<std::vector<Vec>> ConfigFile::point_lists(const std::string& sec, const std::string& key) const {
  std::vector<std::vector<Vec>> out;
  const Section* s = section(sec);
  if (!s) return out;
  auto it = s->find(key);
  if (it == s->end()) return out;
  for (const std::string& value : it->second) {
    std::vector<Vec> pts;
    for (const std::string& part : split(value, ';')) pts.push_back(parse_point(part));
    out.push_back(std::move(pts));
  }
  return out;
}

std::string ConfigFile::canonical() const {
  std::string out;
  for (const auto& [name, sec] : sections_) {
    out += "[" + name + "]\n";
    for (const auto& [key, values] : sec)
      for (const std::string& v : values) out += key + "=" + v + "\n";
  }
  return out;
}

}  // namespace nulldist

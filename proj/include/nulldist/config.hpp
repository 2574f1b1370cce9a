#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nulldist/models.hpp"

namespace nulldist {

// Flat key = value text with [section] headers; '#' starts a comment. Keys
// may repeat, values keep their order. See README for the grammar.
class ConfigFile {
 public:
  using Section = std::map<std::string, std::vector<std::string>>;

  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const Section* section(const std::string& name) const;

  std::optional<std::string> str(const std::string& section, const std::string& key) const;
  std::optional<double> real(const std::string& section, const std::string& key) const;
  std::optional<long> integer(const std::string& section, const std::string& key) const;
  std::optional<bool> boolean(const std::string& section, const std::string& key) const;
  std::optional<std::uint64_t> u64(const std::string& section, const std::string& key) const;
  // Comma-separated reals.
  std::optional<std::vector<double>> reals(const std::string& section, const std::string& key) const;
  std::optional<Vec> point(const std::string& section, const std::string& key) const;
  // Every occurrence of key; each value is a ';'-separated list of points.
  std::vector<std::vector<Vec>> point_lists(const std::string& section, const std::string& key) const;

  // Sorted, whitespace-normalized rendering; hashed into report headers.
  std::string canonical() const;

 private:
  std::map<std::string, Section> sections_;
};

double parse_real(const std::string& s);
std::uint64_t parse_u64(const std::string& s);
Vec parse_point(const std::string& s);

}  // namespace nulldist

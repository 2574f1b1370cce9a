#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "nulldist/models.hpp"

namespace nulldist {

inline constexpr const char* kVersion = "0.1.0";

// 17 significant digits, enough to round-trip a double.
std::string fmt_real(double x);
// Coordinates joined with ';' so a point fits one CSV field.
std::string fmt_point(const Vec& p);

std::string sha256_hex(const std::string& data);

struct ReportHeader {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> extra;
};

// Comment lines starting with '#'; the timestamp lives only here.
void write_header(std::ostream& os, const ReportHeader& h);

// key=value lines, sorted by key.
void write_footer(std::ostream& os, const std::map<std::string, std::string>& kv);

}  // namespace nulldist

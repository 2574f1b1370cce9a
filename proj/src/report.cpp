#include "nulldist/report.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include <chrono>
#include <ctime>

namespace nulldist {

std::string fmt_real(double x) { return fmt::format("{:.17g}", x); }

std::string fmt_point(const Vec& p) {
  std::string s;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) s += ';';
    s += fmt_real(p[i]);
  }
  return s;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

void write_header(std::ostream& os, const ReportHeader& h) {
  const std::time_t now = std::time(nullptr);
  os << "# nulldist " << kVersion << '\n';
  os << "# command = " << h.command << '\n';
  os << "# config_sha256 = " << h.config_hash << '\n';
  os << "# seed = " << h.seed << '\n';
  for (const auto& [k, v] : h.extra) os << "# " << k << " = " << v << '\n';
  os << "# generated = " << fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now)) << '\n';
}

void write_footer(std::ostream& os, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
}

}  // namespace nulldist

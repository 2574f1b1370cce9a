#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nulldist/distance.hpp"
#include "nulldist/models.hpp"

namespace nulldist {

enum class JPlus { yes, no, unknown };
enum class JSource { oracle, lattice, none };
const char* to_string(JPlus j);
const char* to_string(JSource s);

struct JPlusOptions {
  bool use_lattice = true;
  double delta = 0.25;
  int stencil = 2;
  std::optional<double> pad;  // default chebyshev(p,q) + 1
  std::size_t node_cap = 2'000'000;
};

// Only the oracle may answer "no".
std::pair<JPlus, JSource> jplus_verdict(const SpacetimeModel& m, const Vec& p, const Vec& q,
                                        const JPlusOptions& opts = {});

inline double default_rhat_tol(double dtau) { return 1e-6 * (1.0 + std::abs(dtau)); }

// (member, gap) with gap = upper - (tau(q) - tau(p)).
std::pair<bool, double> rhat_member(const SpacetimeModel& m, const Vec& p, const Vec& q,
                                    const DistanceEstimate& est, std::optional<double> tol = {});

struct RelationVerdict {
  Vec p, q;
  JPlus j_plus = JPlus::unknown;
  JSource j_source = JSource::none;
  bool r_hat = false;
  double r_hat_gap = 0.0;
  double tol = 0.0;
  double upper = 0.0;
};

// Extra upper bound on the null distance of a pair, e.g. a witness length.
using UpperBoundFn = std::function<std::optional<double>(const Vec&, const Vec&)>;

struct EncodingOptions {
  JPlusOptions jplus;
  bool lattice_estimate = true;
  EstimateOptions estimate;
  std::vector<UpperBoundFn> extra_bounds;
  std::optional<double> tol;
};

enum class EncodingFlag { encodes, violates, inconclusive };
const char* to_string(EncodingFlag f);

struct EncodingReport {
  std::string model;
  std::vector<RelationVerdict> rows;
  EncodingFlag flag = EncodingFlag::encodes;
};

// Upper estimate: exact oracle, else the minimum of the extra bounds and the
// lattice estimate.
RelationVerdict relation_verdict(const SpacetimeModel& m, const Vec& p, const Vec& q,
                                 const EncodingOptions& opts = {});

EncodingReport encoding_report(const SpacetimeModel& m, const std::vector<std::pair<Vec, Vec>>& pairs,
                               const EncodingOptions& opts = {});

// p,q,tau_p,tau_q,j_plus,j_source,r_hat,gap
void write_encoding_csv(std::ostream& os, const SpacetimeModel& m, const EncodingReport& r,
                        bool header = true);

}  // namespace nulldist

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nulldist/lattice.hpp"
#include "nulldist/models.hpp"

namespace nulldist {

// tau(q) - tau(p) >= C d_h(p,q) on causal pairs; h must be constant so that the
// straight chord realizes d_h.
struct AntiLipschitzBound {
  AuxiliaryMetric h;
  double C = 0.0;
};

struct EstimateOptions {
  int levels = 6;
  double conv_tol = 1e-3;
  std::optional<double> region_pad;  // default 2 * chebyshev(p,q) + 1
  std::optional<Vec> axis_pad;       // per-axis padding, overrides region_pad
  std::optional<Box> region;         // explicit box, overrides padding
  int stencil = 2;
  double delta0 = 1.0;  // spacing at level 0; level l uses delta0 / 2^l
  bool exact_endpoints = true;
  bool stop_when_converged = true;
  std::size_t node_cap = 5'000'000;
  int threads = 1;
  std::optional<AntiLipschitzBound> anti_lipschitz;
};

struct DistanceEstimate {
  double upper = 0.0;
  double lower = 0.0;
  int level = 0;
  bool converged = false;
  std::vector<std::pair<int, double>> history;  // (level, best upper so far)
};

double chebyshev(const Vec& a, const Vec& b);

// Grid-aligned box around {p,q}, anchored so that p is a node.
Box padded_region(const Vec& p, const Vec& q, const Vec& pad, double delta0);
Vec default_padding(const Vec& p, const Vec& q, const EstimateOptions& opts);

double lower_bound(const SpacetimeModel& m, const Vec& p, const Vec& q,
                   const std::optional<AntiLipschitzBound>& al = std::nullopt);

DistanceEstimate estimate(const SpacetimeModel& m, const Vec& p, const Vec& q,
                          const EstimateOptions& opts = {});

std::optional<double> exact_oracle(const SpacetimeModel& m, const Vec& p, const Vec& q);

struct ConvergenceRow {
  int level;
  double delta, upper, lower, gap;
  bool reachable = true;
};

// Upper bound at a fixed spacing while the padding grows.
struct DivergenceProbe {
  int level = 1;
  std::vector<double> pad_factors{1.0, 2.0, 4.0};
  std::vector<int> axes;  // axes whose padding grows; empty means all
};

struct ConvergenceReport {
  std::string model;
  Vec p, q;
  std::vector<ConvergenceRow> rows;
  bool converged = false;
  bool divergent_region = false;
  std::vector<std::pair<double, double>> probe;  // (pad factor, upper)

  std::string flags() const;
};

ConvergenceReport convergence_report(const SpacetimeModel& m, const Vec& p, const Vec& q,
                                     const EstimateOptions& opts = {},
                                     const DivergenceProbe& probe = {});

// model,p,q,level,delta,upper,lower,gap,flags
void write_convergence_csv(std::ostream& os, const ConvergenceReport& r, bool header = true);

}  // namespace nulldist

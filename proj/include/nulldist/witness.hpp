#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "nulldist/models.hpp"
#include "nulldist/paths.hpp"

namespace nulldist {

struct WitnessResult {
  PiecewisePath path;
  double null_len = 0.0;
  double paper_bound = 0.0;
  double slack = 0.0;  // paper_bound - null_len
  Params params;
  bool verified = true;
};

// Dyadic sawtooth on [0,L]: 2^n teeth of height L / 2^(n+1), slopes +-1.
double tent_function(int n, double L, double s);

// gamma + 3 f_n in the tau direction; gamma is reparametrized by Wick arclength.
// Minkowski with tau = t only. Causality failures are reported in `verified`.
WitnessResult wick2_deformation(const SpacetimeModel& m, const PiecewisePath& gamma, int n);

// 2k null segments in the slab above max(t_p, t_q), joined to p and q by
// vertical segments. Flat Minkowski metrics only.
WitnessResult minkowski_bounce(const SpacetimeModel& m, const Vec& p, const Vec& q, int k);

// Route p -> q1 -> (zigzag) -> q2 -> q3 -> mirror -> q on the slit plane.
WitnessResult counterexK_witness(double t_p, double x_p, double t_q, double x_q, long k);

// Point (t, x) on the null geodesic of the {y = const} plane of warped_ads.
Vec ads_null_geodesic(double t0, double s, int sign);

// p = (-pi/2, 0, y_p) -> x = s along the null geodesic -> k bounces in the
// x = s plane -> mirror descent to q = (pi/2, 0, y_q).
WitnessResult counterexsimple_witness(double y_p, double y_q, double s, long k);

// Shortest applicable witness construction for the pair (either order), if
// any: counterexK routes on the slit plane, counterexsimple bounces on
// warped_ads, slab bounces on flat Minkowski metrics.
std::optional<double> witness_upper_bound(const SpacetimeModel& m, const Vec& p, const Vec& q);

// params,null_len,paper_bound,slack
void write_sweep_csv(std::ostream& os, const std::vector<WitnessResult>& rows, bool header = true);

}  // namespace nulldist

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "nulldist/lattice.hpp"
#include "nulldist/models.hpp"
#include "nulldist/paths.hpp"

namespace nulldist::testing {

inline constexpr double kPi = 3.14159265358979323846;

// Sampling box per catalog model, kept where tau is a well-behaved time
// function and away from excluded sets.
inline Box sample_box(const SpacetimeModel& m) {
  const int d = m.dim;
  Box b{Vec::Constant(d, -1.0), Vec::Constant(d, 1.0)};
  if (m.label == "minkowski_sqrt") {
    b.lo[0] = 0.5;
    b.hi[0] = 2.0;
  } else if (m.label == "warped_ads") {
    b.lo = make_point({-1.0, -2.0, -1.0});
    b.hi = make_point({1.0, 2.0, 1.0});
  } else if (m.label == "slit_minkowski_cubic") {
    b.lo = make_point({-1.0, -2.0});
    b.hi = make_point({1.0, 1.0});
  } else if (m.label == "slice_incomplete_warp") {
    b.lo = make_point({-1.0, -3.0});
    b.hi = make_point({1.0, 3.0});
  }
  return b;
}

inline bool inside(const Box& b, const Vec& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < b.lo[i] || x[i] > b.hi[i]) return false;
  return true;
}

inline Vec uniform_point(std::mt19937_64& rng, const Box& b) {
  Vec x(b.lo.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::uniform_real_distribution<double>(b.lo[i], b.hi[i])(rng);
  return x;
}

// One strictly causal step from x: random spatial displacement, time component
// chosen from the diagonal metric at x with a safety factor, random sign.
inline Vec causal_step(const SpacetimeModel& m, std::mt19937_64& rng, const Vec& x, double size,
                       double factor) {
  std::normal_distribution<double> gauss;
  const Mat g = m.metric(x);
  Vec v = Vec::Zero(m.dim);
  double spatial = 0.0;
  for (int i = 1; i < m.dim; ++i) {
    v[i] = size * gauss(rng);
    spatial += g(i, i) * v[i] * v[i];
  }
  v[0] = factor * std::sqrt(spatial / -g(0, 0)) + 1e-3 * size;
  if (std::uniform_int_distribution<int>(0, 1)(rng)) v[0] = -v[0];
  return v;
}

// Random piecewise causal path with `segments` segments inside the sample box;
// every segment passes segment_causal.
inline PiecewisePath random_causal_path(const SpacetimeModel& m, std::mt19937_64& rng, int segments) {
  const Box box = sample_box(m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    std::vector<Vec> pts{uniform_point(rng, box)};
    if (!m.in_domain(pts[0])) continue;
    int stalls = 0;
    while (static_cast<int>(pts.size()) <= segments && stalls < 200) {
      const double factor = 1.0 + 1.5 * unit(rng);
      const Vec next = pts.back() + causal_step(m, rng, pts.back(), 0.05 + 0.3 * unit(rng), factor);
      if (!inside(box, next) || !m.in_domain(next) ||
          segment_causal(m, pts.back(), next).status != CausalStatus::verified) {
        ++stalls;
        continue;
      }
      pts.push_back(next);
    }
    if (static_cast<int>(pts.size()) == segments + 1) return make_path(m, std::move(pts));
  }
}

// Independent shortest null distance on a hand-built grid: all offsets with
// Chebyshev norm <= r (not only primitive ones), causal when |dt| >= |dx| in a
// constant Minkowski metric, weight |delta tau|. Bellman-Ford relaxation.
inline double brute_force_minkowski(const SpacetimeModel& m, const Vec& lo, int nt, int nx, double delta,
                                    int r, int ip, int jp, int iq, int jq) {
  const int n = nt * nx;
  auto id = [nx](int i, int j) { return i * nx + j; };
  auto pos = [&](int i, int j) { return make_point({lo[0] + i * delta, lo[1] + j * delta}); };
  std::vector<double> tau(n);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nx; ++j) tau[id(i, j)] = m.tau(pos(i, j));
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  dist[id(ip, jp)] = 0.0;
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < nx; ++j) {
        const double di = dist[id(i, j)];
        if (!std::isfinite(di)) continue;
        for (int a = -r; a <= r; ++a)
          for (int b = -r; b <= r; ++b) {
            if ((a == 0 && b == 0) || std::abs(a) < std::abs(b)) continue;
            const int i2 = i + a, j2 = j + b;
            if (i2 < 0 || i2 >= nt || j2 < 0 || j2 >= nx) continue;
            const double w = std::abs(tau[id(i2, j2)] - tau[id(i, j)]);
            if (di + w < dist[id(i2, j2)]) {
              dist[id(i2, j2)] = di + w;
              changed = true;
            }
          }
      }
    if (!changed) break;
  }
  return dist[id(iq, jq)];
}

}  // namespace nulldist::testing

#include "nulldist/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nulldist/report.hpp"

namespace nulldist {

double chebyshev(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

Box padded_region(const Vec& p, const Vec& q, const Vec& pad, double delta0) {
  Box box{Vec(p.size()), Vec(p.size())};
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double lo = std::min(p[i], q[i]) - pad[i];
    const double hi = std::max(p[i], q[i]) + pad[i];
    const double below = std::ceil((p[i] - lo) / delta0 - 1e-9);
    const double above = std::ceil((hi - p[i]) / delta0 - 1e-9);
    box.lo[i] = p[i] - below * delta0;
    box.hi[i] = p[i] + above * delta0;
  }
  return box;
}

Vec default_padding(const Vec& p, const Vec& q, const EstimateOptions& opts) {
  if (opts.axis_pad) return *opts.axis_pad;
  const double pad = opts.region_pad ? *opts.region_pad : 2.0 * chebyshev(p, q) + 1.0;
  return Vec::Constant(p.size(), pad);
}

double lower_bound(const SpacetimeModel& m, const Vec& p, const Vec& q,
                   const std::optional<AntiLipschitzBound>& al) {
  double lb = std::abs(m.tau(q) - m.tau(p));
  if (al) {
    if (!al->h.constant)
      throw Error(Errc::BadParams, "anti-Lipschitz lower bound needs a constant metric h");
    const Vec v = q - p;
    const double dh = std::sqrt(v.dot(al->h.evaluator(p) * v));
    lb = std::max(lb, al->C * dh);
  }
  return lb;
}

namespace {

bool gap_closed(double upper, double lower) {
  return upper - lower <= 1e-12 * (1.0 + std::abs(upper));
}

LatticeSpec level_spec(const Box& region, double delta, const EstimateOptions& opts) {
  LatticeSpec s;
  s.region = region;
  s.spacing = delta;
  s.stencil_radius = opts.stencil;
  s.node_cap = opts.node_cap;
  s.threads = opts.threads;
  return s;
}

}  // namespace

DistanceEstimate estimate(const SpacetimeModel& m, const Vec& p, const Vec& q,
                          const EstimateOptions& opts) {
  if (!m.in_domain(p) || !m.in_domain(q))
    throw Error(Errc::OutOfDomain, "estimate: endpoint outside domain");
  if (opts.levels < 0 || !(opts.delta0 > 0) || !(opts.conv_tol > 0))
    throw Error(Errc::BadParams, "estimate: levels >= 0, delta0 > 0 and conv_tol > 0 required");
  DistanceEstimate est;
  est.lower = lower_bound(m, p, q, opts.anti_lipschitz);
  if (p == q) {
    est.converged = true;
    est.history.push_back({0, 0.0});
    return est;
  }
  const Box region = opts.region ? *opts.region
                                 : padded_region(p, q, default_padding(p, q, opts), opts.delta0);
  QueryOptions qo;
  qo.exact_endpoints = opts.exact_endpoints;
  double best = std::numeric_limits<double>::infinity();
  bool any_built = false;
  for (int level = 0; level <= opts.levels; ++level) {
    const double delta = std::ldexp(opts.delta0, -level);
    CausalLattice lat;
    try {
      lat = build(m, level_spec(region, delta, opts));
    } catch (const Error& e) {
      if (e.code() == Errc::TooLarge && any_built) break;
      throw;
    }
    any_built = true;
    double value;
    try {
      value = null_shortest_path(lat, p, q, qo).value;
    } catch (const Error& e) {
      if (e.code() == Errc::Unreachable) continue;
      throw;
    }
    const double prev = best;
    best = std::min(best, value);
    est.history.push_back({level, best});
    est.upper = best;
    est.level = level;
    const bool closed = gap_closed(best, est.lower);
    const bool settled = std::isfinite(prev) && std::abs(prev - best) < opts.conv_tol * std::abs(best);
    est.converged = closed || settled;
    if (est.converged && opts.stop_when_converged) break;
  }
  if (est.history.empty()) throw Error(Errc::Unreachable, "no lattice level connects the points");
  return est;
}

std::optional<double> exact_oracle(const SpacetimeModel& m, const Vec& p, const Vec& q) {
  if (m.nulldist_oracle)
    if (auto v = m.nulldist_oracle(p, q)) return v;
  if (m.causal_oracle) {
    auto fwd = m.causal_oracle(p, q);
    auto bwd = m.causal_oracle(q, p);
    if ((fwd && *fwd) || (bwd && *bwd)) return std::abs(m.tau(q) - m.tau(p));
  }
  return std::nullopt;
}

std::string ConvergenceReport::flags() const {
  std::string f = converged ? "CONVERGED" : "NOT_CONVERGED";
  if (divergent_region) f += "|DIVERGENT_REGION";
  return f;
}

ConvergenceReport convergence_report(const SpacetimeModel& m, const Vec& p, const Vec& q,
                                     const EstimateOptions& opts, const DivergenceProbe& probe) {
  ConvergenceReport rep;
  rep.model = m.label;
  rep.p = p;
  rep.q = q;
  const double lower = lower_bound(m, p, q, opts.anti_lipschitz);
  if (p == q) {
    rep.rows.push_back({0, opts.delta0, 0.0, lower, 0.0, true});
    rep.converged = true;
    return rep;
  }
  const Vec pad = default_padding(p, q, opts);
  const Box region = opts.region ? *opts.region : padded_region(p, q, pad, opts.delta0);
  QueryOptions qo;
  qo.exact_endpoints = opts.exact_endpoints;

  double best = std::numeric_limits<double>::infinity();
  double prev_best = best;
  for (int level = 0; level <= opts.levels; ++level) {
    const double delta = std::ldexp(opts.delta0, -level);
    ConvergenceRow row{level, delta, best, lower, best - lower, true};
    try {
      const CausalLattice lat = build(m, level_spec(region, delta, opts));
      prev_best = best;
      best = std::min(best, null_shortest_path(lat, p, q, qo).value);
      row.upper = best;
      row.gap = best - lower;
    } catch (const Error& e) {
      if (e.code() == Errc::TooLarge && !rep.rows.empty()) break;
      if (e.code() != Errc::Unreachable) throw;
      row.reachable = false;
    }
    rep.rows.push_back(row);
  }
  if (std::isfinite(best))
    rep.converged = gap_closed(best, lower) ||
                    (std::isfinite(prev_best) && std::abs(prev_best - best) < opts.conv_tol * std::abs(best));

  // Fixed spacing, growing region: a strict improvement means minimizers leave
  // every box of the sweep.
  const double delta = std::ldexp(opts.delta0, -probe.level);
  double last = std::numeric_limits<double>::infinity();
  for (double f : probe.pad_factors) {
    Vec grown = pad;
    for (Eigen::Index i = 0; i < pad.size(); ++i) {
      const bool on = probe.axes.empty() ||
                      std::find(probe.axes.begin(), probe.axes.end(), static_cast<int>(i)) != probe.axes.end();
      if (on) grown[i] = pad[i] * f;
    }
    double value = std::numeric_limits<double>::infinity();
    try {
      const CausalLattice lat = build(m, level_spec(padded_region(p, q, grown, opts.delta0), delta, opts));
      value = null_shortest_path(lat, p, q, qo).value;
    } catch (const Error& e) {
      if (e.code() == Errc::TooLarge) break;
      if (e.code() != Errc::Unreachable) throw;
    }
    rep.probe.push_back({f, value});
    if (std::isfinite(last) && value < last * (1.0 - 1e-9)) rep.divergent_region = true;
    last = std::min(last, value);
  }
  return rep;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& r, bool header) {
  if (header) os << "model,p,q,level,delta,upper,lower,gap,flags\n";
  const std::string flags = r.flags();
  for (const ConvergenceRow& row : r.rows) {
    os << r.model << ',' << fmt_point(r.p) << ',' << fmt_point(r.q) << ',' << row.level << ','
       << fmt_real(row.delta) << ',' << fmt_real(row.upper) << ',' << fmt_real(row.lower) << ','
       << fmt_real(row.gap) << ',' << (row.reachable ? flags : flags + "|UNREACHABLE") << '\n';
  }
}

}  // namespace nulldist

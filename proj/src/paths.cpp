#include "nulldist/paths.hpp"

#include <gsl/gsl_integration.h>

#include <Eigen/LU>
#include <cmath>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "nulldist/report.hpp"

namespace nulldist {

const char* to_string(CausalStatus s) {
  switch (s) {
    case CausalStatus::verified: return "verified";
    case CausalStatus::violated: return "violated";
    case CausalStatus::boundary_crossing: return "boundary_crossing";
  }
  return "?";
}

PiecewisePath PiecewisePath::reversed() const {
  PiecewisePath r;
  r.model_label = model_label;
  r.breakpoints.assign(breakpoints.rbegin(), breakpoints.rend());
  for (auto it = orientations.rbegin(); it != orientations.rend(); ++it)
    r.orientations.push_back(*it == Orientation::future ? Orientation::past
                             : *it == Orientation::past ? Orientation::future
                                                        : Orientation::none);
  return r;
}

PiecewisePath concat(const PiecewisePath& a, const PiecewisePath& b) {
  if (a.breakpoints.empty()) return b;
  if (b.breakpoints.empty()) return a;
  if (a.breakpoints.back() != b.breakpoints.front())
    throw Error(Errc::BadParams, "concat: paths do not meet");
  PiecewisePath r = a;
  r.breakpoints.insert(r.breakpoints.end(), b.breakpoints.begin() + 1, b.breakpoints.end());
  r.orientations.insert(r.orientations.end(), b.orientations.begin(), b.orientations.end());
  return r;
}

double default_margin(const SpacetimeModel& m) { return m.constant_metric ? 0.0 : -1e-9; }

CausalVerdict segment_causal(const SpacetimeModel& m, const Vec& a, const Vec& b, int n_samples) {
  return segment_causal(m, a, b, n_samples, default_margin(m));
}

CausalVerdict segment_causal(const SpacetimeModel& m, const Vec& a, const Vec& b,
                             int n_samples, double margin) {
  if (a == b) throw Error(Errc::DegenerateSegment, "segment endpoints coincide");
  if (n_samples < 2) throw Error(Errc::BadParams, "segment_causal needs n_samples >= 2");
  CausalVerdict out;
  if (m.segment_blocked && m.segment_blocked(a, b)) {
    out.status = CausalStatus::boundary_crossing;
    return out;
  }
  const Vec v = b - a;
  const double threshold = margin == 0.0 ? kTolNull : margin;
  int sign = 0;
  for (int i = 0; i < n_samples; ++i) {
    const Vec x = i == n_samples - 1 ? b : Vec(a + (double(i) / (n_samples - 1)) * v);
    if (!m.in_domain(x)) {
      out.status = CausalStatus::boundary_crossing;
      return out;
    }
    const Mat g = m.metric(x);
    const double q = v.dot(g * v);
    const Vec dt = m.dtau_at(x);
    double d = dt.dot(v);
    if (std::isnan(d)) d = 0.0;

    double norm;
    const double gg = dt.dot(g.inverse() * dt);
    const double alpha = -1.0 / gg;
    if (m.temporal && gg < 0.0 && std::isfinite(alpha) && alpha > 0.0 && std::isfinite(d))
      norm = q + 2.0 * alpha * d * d;  // alpha * |v|_W^2
    else
      norm = g.cwiseAbs().maxCoeff() * v.squaredNorm();
    const double mu = q / norm;
    out.worst_margin = std::max(out.worst_margin, mu);

    const int s = d > 0 ? 1 : d < 0 ? -1 : 0;
    if (i == 0) sign = s;
    if (!(mu <= threshold) || s == 0 || s != sign) out.status = CausalStatus::violated;
  }
  if (out.status == CausalStatus::verified)
    out.orientation = sign > 0 ? Orientation::future : Orientation::past;
  return out;
}

CausalVerdict verify_causal(const SpacetimeModel& m, const PiecewisePath& path, int n_samples) {
  CausalVerdict out;
  if (path.breakpoints.size() != path.orientations.size() + 1)
    throw Error(Errc::BadParams, "path needs one orientation per segment");
  for (std::size_t i = 0; i < path.segments(); ++i) {
    CausalVerdict s = segment_causal(m, path.breakpoints[i], path.breakpoints[i + 1], n_samples);
    out.worst_margin = std::max(out.worst_margin, s.worst_margin);
    if (s.status == CausalStatus::verified && s.orientation != path.orientations[i])
      s.status = CausalStatus::violated;
    if (s.status != CausalStatus::verified) {
      out.status = s.status;
      out.failing_segment = i;
      return out;
    }
  }
  return out;
}

PiecewisePath make_path(const SpacetimeModel& m, std::vector<Vec> points, int n_samples) {
  PiecewisePath path;
  path.model_label = m.label;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const CausalVerdict s = segment_causal(m, points[i], points[i + 1], n_samples);
    if (s.status != CausalStatus::verified)
      throw Error(Errc::NotCausal, "segment " + std::to_string(i) + " is " + to_string(s.status));
    path.orientations.push_back(s.orientation);
  }
  path.breakpoints = std::move(points);
  return path;
}

double null_length_unchecked(const SpacetimeModel& m, const PiecewisePath& path) {
  // Neumaier summation; witness paths run to ~1e5 segments.
  double total = 0.0, comp = 0.0;
  double prev = path.breakpoints.empty() ? 0.0 : m.tau(path.breakpoints[0]);
  for (std::size_t i = 1; i < path.breakpoints.size(); ++i) {
    const double cur = m.tau(path.breakpoints[i]);
    const double d = std::abs(cur - prev);
    const double t = total + d;
    comp += std::abs(total) >= d ? (total - t) + d : (d - t) + total;
    total = t;
    prev = cur;
  }
  return total + comp;
}

double null_length(const SpacetimeModel& m, const PiecewisePath& path) {
  const CausalVerdict v = verify_causal(m, path);
  if (v.status != CausalStatus::verified)
    throw Error(Errc::NotCausal, "segment " + std::to_string(*v.failing_segment) + " is " +
                                     to_string(v.status));
  return null_length_unchecked(m, path);
}

namespace {

const gsl_integration_glfixed_table* gl_table(int n) {
  static std::mutex mu;
  static std::unordered_map<int, std::unique_ptr<gsl_integration_glfixed_table,
                                                 void (*)(gsl_integration_glfixed_table*)>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, decltype(cache)::mapped_type(gsl_integration_glfixed_table_alloc(n),
                                                       gsl_integration_glfixed_table_free))
             .first;
  return it->second.get();
}

double composite_gl(const SpacetimeModel& m, const Vec& a, const Vec& v, int n, int panels) {
  const gsl_integration_glfixed_table* t = gl_table(n);
  double sum = 0.0;
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    for (int j = 0; j < n; ++j) {
      double xi, wi;
      gsl_integration_glfixed_point(p * h, (p + 1) * h, static_cast<size_t>(j), &xi, &wi, t);
      const Vec x = a + xi * v;
      sum += wi * std::sqrt(std::max(0.0, wick_norm_sq(m, x, v)));
    }
  }
  return sum;
}

}  // namespace

double wick_segment_length(const SpacetimeModel& m, const Vec& a, const Vec& b, int quad_points) {
  if (quad_points < 2) throw Error(Errc::BadParams, "quad_points must be >= 2");
  if (!m.in_domain(a) || !m.in_domain(b))
    throw Error(Errc::OutOfDomain, "wick_length: breakpoint outside domain");
  const Vec v = b - a;
  if (v.isZero(0.0)) return 0.0;
  double prev = composite_gl(m, a, v, quad_points, 1);
  for (int panels = 2; panels <= 4096; panels *= 2) {
    const double cur = composite_gl(m, a, v, quad_points, panels);
    if (std::abs(cur - prev) <= 1e-9 * std::abs(cur)) return cur;
    prev = cur;
  }
  return prev;
}

double wick_length(const SpacetimeModel& m, const PiecewisePath& path, int quad_points) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.breakpoints.size(); ++i)
    total += wick_segment_length(m, path.breakpoints[i], path.breakpoints[i + 1], quad_points);
  return total;
}

void write_path_csv(std::ostream& os, const PiecewisePath& path) {
  os << "segment,orientation";
  const Eigen::Index dim = path.breakpoints.empty() ? 0 : path.breakpoints[0].size();
  for (Eigen::Index i = 0; i < dim; ++i) os << ",x" << i;
  os << '\n';
  for (std::size_t j = 0; j < path.breakpoints.size(); ++j) {
    os << j << ',' << (j < path.segments() ? to_string(path.orientations[j]) : "none");
    for (Eigen::Index i = 0; i < dim; ++i) os << ',' << fmt_real(path.breakpoints[j][i]);
    os << '\n';
  }
}

}  // namespace nulldist

#include "nulldist/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nulldist/report.hpp"

namespace nulldist {

double tent_function(int n, double L, double s) {
  if (n < 0 || !(L > 0.0)) throw Error(Errc::BadParams, "tent_function: n >= 0 and L > 0 required");
  if (!(s >= 0.0 && s <= L)) throw Error(Errc::OutOfRange, "tent_function: s outside [0, L]");
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    s = s <= 0.5 * L ? 2.0 * s : 2.0 * s - L;
    scale *= 0.5;
  }
  return scale * std::min(s, L - s);
}

namespace {

PiecewisePath unverified_path(const SpacetimeModel& m, std::vector<Vec> pts, bool& ok) {
  PiecewisePath path;
  path.model_label = m.label;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const CausalVerdict v = segment_causal(m, pts[i], pts[i + 1]);
    if (v.status != CausalStatus::verified) ok = false;
    path.orientations.push_back(v.orientation);
  }
  path.breakpoints = std::move(pts);
  return path;
}

void finish(WitnessResult& r, const SpacetimeModel& m) {
  r.null_len = null_length_unchecked(m, r.path);
  r.slack = r.paper_bound - r.null_len;
}

bool is_flat_minkowski(const SpacetimeModel& m, const Vec& x) {
  if (!m.constant_metric) return false;
  Mat eta = Mat::Identity(m.dim, m.dim);
  eta(0, 0) = -1.0;
  return (m.metric(x) - eta).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

WitnessResult wick2_deformation(const SpacetimeModel& m, const PiecewisePath& gamma, int n) {
  if (m.label != "minkowski")
    throw Error(Errc::BadParams, "wick2_deformation needs the minkowski model (tau = t)");
  if (n < 0 || n > 30) throw Error(Errc::BadParams, "wick2_deformation: n in [0, 30]");
  if (gamma.breakpoints.size() < 2) throw Error(Errc::BadParams, "wick2_deformation: empty curve");

  const auto& b = gamma.breakpoints;
  std::vector<double> arc{0.0};
  for (std::size_t i = 0; i + 1 < b.size(); ++i)
    arc.push_back(arc.back() + wick_segment_length(m, b[i], b[i + 1]));
  const double L = arc.back();
  if (!(L > 0.0)) throw Error(Errc::BadParams, "wick2_deformation: curve has zero length");

  // Tent nodes and curve breakpoints, merged by arclength.
  const long teeth = 1L << (n + 1);
  std::vector<double> s_all(arc);
  for (long j = 1; j < teeth; ++j) s_all.push_back(L * double(j) / double(teeth));
  std::sort(s_all.begin(), s_all.end());
  std::vector<double> s_nodes;
  for (double s : s_all)
    if (s_nodes.empty() || s - s_nodes.back() > 1e-12 * L) s_nodes.push_back(s);
  s_nodes.back() = L;

  std::vector<Vec> pts;
  std::size_t seg = 0;
  for (double s : s_nodes) {
    while (seg + 2 < arc.size() && s > arc[seg + 1]) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double lam = len > 0.0 ? std::clamp((s - arc[seg]) / len, 0.0, 1.0) : 0.0;
    Vec x = b[seg] + lam * (b[seg + 1] - b[seg]);
    x[0] += 3.0 * tent_function(n, L, std::clamp(s, 0.0, L));
    pts.push_back(x);
  }

  WitnessResult r;
  r.path = unverified_path(m, std::move(pts), r.verified);
  r.paper_bound = 4.0 * L;
  r.params = {{"n", double(n)}, {"L_W", L}};
  finish(r, m);
  return r;
}

WitnessResult minkowski_bounce(const SpacetimeModel& m, const Vec& p, const Vec& q, int k) {
  if (k < 1) throw Error(Errc::BadParams, "minkowski_bounce: k >= 1 required");
  if (p.size() != m.dim || q.size() != m.dim)
    throw Error(Errc::BadParams, "minkowski_bounce: dimension mismatch");
  if (!m.in_domain(p) || !m.in_domain(q)) throw Error(Errc::OutOfDomain, "minkowski_bounce: endpoint");
  if (!is_flat_minkowski(m, p))
    throw Error(Errc::BadParams, "minkowski_bounce needs a flat Minkowski metric");

  const double tb = std::max(p[0], q[0]);
  const Vec dx = (q - p).tail(m.dim - 1);
  const double w = dx.norm();
  std::vector<Vec> pts{p};
  auto push = [&](const Vec& x) {
    if (x != pts.back()) pts.push_back(x);
  };
  Vec base = p;
  base[0] = tb;
  push(base);
  double bound = std::abs(m.tau(base) - m.tau(p));
  if (w > 0.0) {
    const double h = w / (2.0 * k);
    for (int j = 1; j <= 2 * k; ++j) {
      Vec x(m.dim);
      x[0] = tb + (j % 2 ? h : 0.0);
      x.tail(m.dim - 1) = p.tail(m.dim - 1) + (double(j) / (2.0 * k)) * dx;
      if (j == 2 * k) x.tail(m.dim - 1) = q.tail(m.dim - 1);
      push(x);
    }
    // tau may depend on t only; one tooth of the slab costs phi(tb + h) - phi(tb).
    Vec lo = base, hi = base;
    hi[0] += h;
    bound += 2.0 * k * std::abs(m.tau(hi) - m.tau(lo));
  }
  Vec top = q;
  top[0] = tb;
  bound += std::abs(m.tau(q) - m.tau(top));
  push(q);

  WitnessResult r;
  r.path = make_path(m, std::move(pts));
  r.paper_bound = bound;
  r.params = {{"k", double(k)}, {"t_b", tb}, {"width", w}};
  finish(r, m);
  return r;
}

WitnessResult counterexK_witness(double t_p, double x_p, double t_q, double x_q, long k) {
  if (k < 1) throw Error(Errc::BadParams, "counterexK: k >= 1 required");
  if (!(x_p > 0.0 && x_q > 0.0)) throw Error(Errc::BadParams, "counterexK: x_p, x_q > 0 required");
  const double kd = double(k);
  const double hp = x_p / kd, hq = x_q / kd;
  if (!(t_p > hp && -t_q > hq))
    throw Error(Errc::BadParams, "counterexK: need t_p > x_p/k and -t_q > x_q/k");
  const SpacetimeModel m = catalog("slit_minkowski_cubic");

  std::vector<Vec> pts{make_point({t_p, x_p}), make_point({hp, x_p})};
  // 2k almost-null segments between t = hp and 1.5 hp down to the axis x = 0;
  // the 1e-9 tilt absorbs rounding of the x coordinates at large k.
  constexpr double kTilt = 1.0 + 1e-9;
  for (long j = 1; j <= 2 * k; ++j)
    pts.push_back(make_point({j % 2 ? hp + kTilt * hp / 2 : hp, x_p * (1.0 - double(j) / (2.0 * kd))}));
  pts.push_back(make_point({0.0, -std::min(x_p, x_q) / kd}));
  pts.push_back(make_point({-hq, 0.0}));
  for (long j = 1; j <= 2 * k; ++j)
    pts.push_back(make_point({j % 2 ? -hq - kTilt * hq / 2 : -hq, x_q * (double(j) / (2.0 * kd))}));
  pts.push_back(make_point({t_q, x_q}));

  WitnessResult r;
  r.path = make_path(m, std::move(pts));
  r.paper_bound = t_p * t_p * t_p + std::abs(t_q * t_q * t_q) +
                  14.0 * (x_p * x_p * x_p + x_q * x_q * x_q) / (kd * kd);
  r.params = {{"t_p", t_p}, {"x_p", x_p}, {"t_q", t_q}, {"x_q", x_q}, {"k", kd}};
  finish(r, m);
  return r;
}

Vec ads_null_geodesic(double t0, double s, int sign) {
  if (sign != 1 && sign != -1) throw Error(Errc::BadParams, "ads_null_geodesic: sign must be +-1");
  if (!(s >= 0.0)) throw Error(Errc::BadParams, "ads_null_geodesic: s >= 0 required");
  return make_point({t0 + gudermannian(s), sign * s});
}

namespace {

// Future polyline in the (t, x) plane from (-pi/2, 0) to x = s hugging the
// null geodesic from above. Chords are slightly steeper than the geodesic at
// their left end; accumulated overshoot is removed by vertical past drops
// back onto the geodesic once it exceeds half the distance to t = 0.
struct Ascent {
  std::vector<std::pair<double, double>> pts;  // (t, x)
  int drops = 0;
};

double geod_t(double x) { return -2.0 * std::atan(std::exp(-x)); }

double curvature_weight(double x) {
  const double c = std::cosh(x);
  return std::sinh(x) / (c * c);
}

Ascent build_ascent(double s, double eta) {
  constexpr double kBand = 0.9, kStepFrac = 0.01, kMaxStep = 0.25;
  const double kPeak = std::asinh(1.0);
  Ascent a;
  double x = 0.0, t = geod_t(0.0);
  a.pts.emplace_back(t, x);
  while (x < s) {
    // sinh/cosh^2 is unimodal with its peak 1/2 at asinh(1); bound it over the step.
    double dx = std::min(kMaxStep, s - x);
    for (int it = 0; it < 2; ++it) {
      double w = std::max(curvature_weight(x), curvature_weight(x + dx));
      if (x <= kPeak && kPeak <= x + dx) w = 0.5;
      w = std::max(w, 1e-300);
      dx = std::min({dx, eta / std::sqrt(w),
                     std::sqrt(2.0 * kStepFrac * kBand * std::abs(geod_t(x + dx)) / w)});
    }
    if (s - x - dx < 1e-3 * dx) dx = s - x;
    // The lapse-normalized margin of a chord degrades like e^x along the
    // geodesic; the steepening factor keeps it below the verification bias.
    const double kappa = std::max(1e-6, 1.5e-9 * std::exp(x));
    const double xn = x + dx >= s ? s : x + dx;
    const double tn = t + (xn - x) * (1.0 + kappa) / std::cosh(x);
    const double g = geod_t(x), gn = geod_t(xn);
    if (tn - gn > kBand * std::abs(gn) && t > g) {
      t = g;
      a.pts.emplace_back(t, x);
      ++a.drops;
      continue;
    }
    x = xn;
    t = tn;
    a.pts.emplace_back(t, x);
  }
  return a;
}

double sqrt_weight_integral(double s) {
  const int n = 2000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::sqrt(curvature_weight((i + 0.5) * s / n));
  return acc * s / n;
}

}  // namespace

WitnessResult counterexsimple_witness(double y_p, double y_q, double s, long k) {
  const double dy = y_q - y_p;
  if (!(std::abs(dy) > std::numbers::pi))
    throw Error(Errc::BadParams, "counterexsimple: |y_q - y_p| > pi required");
  if (!(s >= 0.0) || !std::isfinite(s)) throw Error(Errc::BadParams, "counterexsimple: s >= 0 required");
  if (k < 1) throw Error(Errc::BadParams, "counterexsimple: k >= 1 required");
  const SpacetimeModel m = catalog("warped_ads");
  const double kd = double(k);
  const double h = std::abs(dy) / kd;
  const double half_pi = std::numbers::pi / 2.0;
  const double c = std::cosh(s);
  const Vec p = make_point({-half_pi, 0.0, y_p});
  const Vec q = make_point({half_pi, 0.0, y_q});
  const double bound = m.tau(q) - m.tau(p) + 2.0 * kd * (h * h * h + h / c);

  constexpr double kExcessBudget = 8e-10;
  constexpr long kMaxChords = 1L << 22;
  const double I = s > 0.0 ? sqrt_weight_integral(s) : 0.0;
  for (int attempt = 0;; ++attempt) {
    const long chords = std::lround(256.0 * std::exp2(0.5 * attempt));
    std::vector<Vec> pts;
    int drops = 0;
    if (s > 0.0) {
      const Ascent asc = build_ascent(s, I / double(chords));
      drops = asc.drops;
      for (const auto& [t, x] : asc.pts) pts.push_back(make_point({t, x, y_p}));
    } else {
      pts.push_back(p);
    }
    const std::size_t n_asc = pts.size();
    if (pts.back()[0] < 0.0) pts.push_back(make_point({0.0, s, y_p}));
    for (long j = 1; j <= 2 * k; ++j)
      pts.push_back(make_point({j % 2 ? h : 0.0, s, j == 2 * k ? y_q : y_p + dy * (double(j) / (2.0 * kd))}));
    // Mirror of the ascent under t -> -t, traversed backwards.
    for (std::size_t i = n_asc; i-- > 0;) {
      const Vec& a = pts[i];
      pts.push_back(make_point({-a[0], a[1], y_q}));
    }

    PiecewisePath path;
    path.model_label = m.label;
    path.breakpoints = std::move(pts);
    const double len = null_length_unchecked(m, path);
    const bool budget_met = len - bound <= kExcessBudget || s == 0.0;
    if (!budget_met && chords < kMaxChords) continue;

    WitnessResult r;
    try {
      r.path = make_path(m, std::move(path.breakpoints));
    } catch (const Error&) {
      if (chords < kMaxChords) continue;
      throw;
    }
    r.paper_bound = bound;
    r.params = {{"y_p", y_p}, {"y_q", y_q}, {"s", s}, {"k", kd}, {"chords", double(chords)},
                {"drops", double(drops)}};
    finish(r, m);
    return r;
  }
}

std::optional<double> witness_upper_bound(const SpacetimeModel& m, const Vec& p, const Vec& q) {
  if (p.size() != m.dim || q.size() != m.dim || p == q) return std::nullopt;
  const bool p_first = p[0] <= q[0];
  const Vec& lo = p_first ? p : q;
  const Vec& hi = p_first ? q : p;
  std::optional<double> best;
  auto offer = [&](double v) {
    if (!best || v < *best) best = v;
  };
  if (m.label == "slit_minkowski_cubic") {
    if (!(lo[0] < 0.0 && hi[0] > 0.0 && lo[1] > 0.0 && hi[1] > 0.0)) return std::nullopt;
    for (long k : {10L, 100L, 1000L, 10000L}) {
      try {
        offer(counterexK_witness(hi[0], hi[1], lo[0], lo[1], k).null_len);
      } catch (const Error& e) {
        if (e.code() != Errc::BadParams) throw;
      }
    }
    return best;
  }
  if (m.label == "warped_ads") {
    const double half_pi = std::numbers::pi / 2.0;
    const bool shape = std::abs(lo[0] + half_pi) <= 1e-12 && std::abs(hi[0] - half_pi) <= 1e-12 &&
                       lo[1] == 0.0 && hi[1] == 0.0 && std::abs(hi[2] - lo[2]) > std::numbers::pi;
    if (!shape) return std::nullopt;
    // s = 15 puts 2|dy|/cosh(s) near 5e-6, inside the default relative tolerance.
    return counterexsimple_witness(lo[2], hi[2], 15.0, 10000).null_len;
  }
  if (is_flat_minkowski(m, p)) {
    try {
      return minkowski_bounce(m, p, q, 256).null_len;
    } catch (const Error& e) {
      if (e.code() != Errc::NotCausal && e.code() != Errc::BadParams) throw;
    }
  }
  return std::nullopt;
}

void write_sweep_csv(std::ostream& os, const std::vector<WitnessResult>& rows, bool header) {
  if (header) os << "params,null_len,paper_bound,slack\n";
  for (const WitnessResult& r : rows) {
    std::string ps;
    for (const auto& [key, val] : r.params) {
      if (!ps.empty()) ps += ';';
      ps += key + "=" + fmt_real(val);
    }
    os << ps << ',' << fmt_real(r.null_len) << ',' << fmt_real(r.paper_bound) << ','
       << fmt_real(r.slack) << '\n';
  }
}

}  // namespace nulldist

#include "nulldist/models.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <numbers>

namespace nulldist {

const char* to_string(CausalType c) {
  switch (c) {
    case CausalType::timelike: return "timelike";
    case CausalType::null: return "null";
    case CausalType::spacelike: return "spacelike";
  }
  return "?";
}

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::future: return "future";
    case Orientation::past: return "past";
    case Orientation::none: return "none";
  }
  return "?";
}

Vec make_point(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double gudermannian(double x) { return 2.0 * std::atan(std::tanh(0.5 * x)); }

bool SpacetimeModel::in_domain(const Vec& x) const {
  if (x.size() != dim || !x.allFinite()) return false;
  return !domain || domain(x);
}

double finite_difference_step(const Vec& x) {
  return 1e-6 * (1.0 + x.cwiseAbs().maxCoeff());
}

Vec SpacetimeModel::dtau_at(const Vec& x) const {
  if (dtau) return dtau(x);
  const double h = finite_difference_step(x);
  Vec d(dim);
  for (int i = 0; i < dim; ++i) {
    Vec a = x, b = x;
    a[i] += h;
    b[i] -= h;
    d[i] = (tau(a) - tau(b)) / (2.0 * h);
  }
  return d;
}

AuxiliaryMetric euclidean_metric(int dim, double scale) {
  AuxiliaryMetric h;
  h.evaluator = [dim, scale](const Vec&) -> Mat { return scale * Mat::Identity(dim, dim); };
  h.label = scale == 1.0 ? "euclidean" : "euclidean*" + std::to_string(scale);
  h.constant = true;
  return h;
}

VectorClass classify_vector(const SpacetimeModel& m, const Vec& x, const Vec& v) {
  if (!m.in_domain(x)) throw Error(Errc::OutOfDomain, "classify_vector: point outside domain");
  const double vv = v.squaredNorm();
  if (vv == 0.0) throw Error(Errc::ZeroVector, "classify_vector: zero vector");
  const Mat g = m.metric(x);
  const double q = v.dot(g * v);
  const double band = kTolNull * g.cwiseAbs().maxCoeff() * vv;

  VectorClass c{};
  if (std::abs(q) <= band) {
    c.causal_type = CausalType::null;
  } else if (q < 0) {
    c.causal_type = CausalType::timelike;
  } else {
    c.causal_type = CausalType::spacelike;
    c.orientation = Orientation::none;
    return c;
  }
  double d = m.dtau_at(x).dot(v);
  if (std::isnan(d) || d == 0.0) d = v[0];
  c.orientation = d > 0 ? Orientation::future : d < 0 ? Orientation::past : Orientation::none;
  return c;
}

double lapse_alpha(const SpacetimeModel& m, const Vec& x) {
  if (!m.temporal) throw Error(Errc::NotTemporal, m.label + " is not flagged temporal");
  if (!m.in_domain(x)) throw Error(Errc::OutOfDomain, "lapse_alpha: point outside domain");
  const Vec dt = m.dtau_at(x);
  const Mat g = m.metric(x);
  const double gg = dt.dot(g.inverse() * dt);
  const double alpha = -1.0 / gg;
  if (!(gg < 0.0) || !std::isfinite(alpha) || !(alpha > 0.0))
    throw Error(Errc::NotTemporal, "g(grad tau, grad tau) >= 0 or singular at point");
  return alpha;
}

double wick_norm_sq(const SpacetimeModel& m, const Vec& x, const Vec& v) {
  const double alpha = lapse_alpha(m, x);
  const double q = v.dot(m.metric(x) * v);
  const double d = m.dtau_at(x).dot(v);
  return q / alpha + 2.0 * d * d;
}

bool lorentzian_signature(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  int neg = 0, pos = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < 0) ++neg;
    else if (ev[i] > 0) ++pos;
  }
  return neg == 1 && pos == g.rows() - 1;
}

namespace {

bool causal_ge(double dt, double dist) {
  return dt >= dist - 1e-12 * (1.0 + std::abs(dt) + dist);
}

double spatial_norm(const Vec& d) { return d.tail(d.size() - 1).norm(); }

std::optional<bool> minkowski_causal(const Vec& p, const Vec& q) {
  const Vec d = q - p;
  return causal_ge(d[0], spatial_norm(d));
}

int read_n(const Params& params, const std::string& name) {
  int n = 1;
  for (const auto& [k, v] : params) {
    if (k != "n") throw Error(Errc::BadParams, name + ": unknown parameter '" + k + "'");
    if (v != std::floor(v) || v < 1 || v > kMaxDim - 1)
      throw Error(Errc::BadParams, name + ": n must be an integer in [1," +
                                       std::to_string(kMaxDim - 1) + "]");
    n = static_cast<int>(v);
  }
  return n;
}

void no_params(const Params& params, const std::string& name) {
  if (!params.empty())
    throw Error(Errc::BadParams, name + ": takes no parameters, got '" + params.begin()->first + "'");
}

SpacetimeModel minkowski_base(int n, const std::string& label, const Params& params) {
  SpacetimeModel m;
  m.dim = n + 1;
  m.label = label;
  m.params = params;
  m.constant_metric = true;
  const int dim = m.dim;
  m.metric = [dim](const Vec&) -> Mat {
    Mat g = Mat::Identity(dim, dim);
    g(0, 0) = -1.0;
    return g;
  };
  m.causal_oracle = minkowski_causal;
  return m;
}

SpacetimeModel make_minkowski(const Params& params) {
  const int n = read_n(params, "minkowski");
  SpacetimeModel m = minkowski_base(n, "minkowski", params);
  const int dim = m.dim;
  m.tau = [](const Vec& x) { return x[0]; };
  m.dtau = [dim](const Vec&) -> Vec {
    Vec d = Vec::Zero(dim);
    d[0] = 1.0;
    return d;
  };
  m.nulldist_oracle = [](const Vec& p, const Vec& q) -> std::optional<double> {
    const Vec d = q - p;
    return std::max(std::abs(d[0]), spatial_norm(d));
  };
  return m;
}

SpacetimeModel make_minkowski_exp(const Params& params) {
  const int n = read_n(params, "minkowski_exp");
  SpacetimeModel m = minkowski_base(n, "minkowski_exp", params);
  const int dim = m.dim;
  m.tau = [](const Vec& x) { return std::exp(x[0]); };
  m.dtau = [dim](const Vec& x) -> Vec {
    Vec d = Vec::Zero(dim);
    d[0] = std::exp(x[0]);
    return d;
  };
  // Causal pairs: tau difference. Otherwise the cheapest route drops along past
  // null lines to the lowest corner of J-(p) and J-(q); optimal since exp is convex.
  m.nulldist_oracle = [](const Vec& p, const Vec& q) -> std::optional<double> {
    const Vec d = q - p;
    const double r = spatial_norm(d);
    if (causal_ge(std::abs(d[0]), r)) return std::abs(std::exp(q[0]) - std::exp(p[0]));
    const double t_star = 0.5 * (p[0] + q[0] - r);
    return std::exp(p[0]) + std::exp(q[0]) - 2.0 * std::exp(t_star);
  };
  return m;
}

SpacetimeModel make_minkowski_sqrt(const Params& params) {
  const int n = read_n(params, "minkowski_sqrt");
  SpacetimeModel m = minkowski_base(n, "minkowski_sqrt", params);
  const int dim = m.dim;
  m.lipschitz_tau = false;
  m.tau = [](const Vec& x) { return std::copysign(std::sqrt(std::abs(x[0])), x[0]); };
  m.dtau = [dim](const Vec& x) -> Vec {
    Vec d = Vec::Zero(dim);
    d[0] = 0.5 / std::sqrt(std::abs(x[0]));  // +inf on t = 0
    return d;
  };
  m.nulldist_oracle = [](const Vec& p, const Vec& q) -> std::optional<double> {
    const Vec d = q - p;
    if (!causal_ge(std::abs(d[0]), spatial_norm(d))) return std::nullopt;
    auto f = [](double t) { return std::copysign(std::sqrt(std::abs(t)), t); };
    return std::abs(f(q[0]) - f(p[0]));
  };
  return m;
}

// Removed set: the closed ray {t = 0, x >= 0}.
bool on_slit(const Vec& x) { return x[0] == 0.0 && x[1] >= 0.0; }

bool slit_segment_blocked(const Vec& a, const Vec& b) {
  if (on_slit(a) || on_slit(b)) return true;
  if (a[0] == 0.0 && b[0] == 0.0) return std::max(a[1], b[1]) >= 0.0;
  if ((a[0] < 0.0) == (b[0] < 0.0) && a[0] != 0.0 && b[0] != 0.0) return false;
  const double lam = a[0] / (a[0] - b[0]);
  const double xc = a[1] + lam * (b[1] - a[1]);
  return xc >= 0.0;
}

SpacetimeModel make_slit(const Params& params) {
  no_params(params, "slit_minkowski_cubic");
  SpacetimeModel m = minkowski_base(1, "slit_minkowski_cubic", params);
  m.domain = [](const Vec& x) { return !on_slit(x); };
  m.tau = [](const Vec& x) {
    const double t = x[0], s = x[1];
    return s > 0.0 ? t * t * t : t * t * t + t * s * s;
  };
  m.dtau = [](const Vec& x) -> Vec {
    const double t = x[0], s = x[1];
    if (s > 0.0) return make_point({3.0 * t * t, 0.0});
    return make_point({3.0 * t * t + s * s, 2.0 * t * s});
  };
  m.segment_blocked = slit_segment_blocked;
  // A future causal curve from below t = 0 to above it crosses t = 0 once, at
  // some x_c < 0 reachable from p and reaching q.
  m.causal_oracle = [](const Vec& p, const Vec& q) -> std::optional<bool> {
    const Vec d = q - p;
    if (d.isZero(0.0)) return true;
    if (!causal_ge(d[0], std::abs(d[1]))) return false;
    if (p[0] < 0.0 && q[0] > 0.0)
      return std::max(p[1] - std::abs(p[0]), q[1] - q[0]) < 0.0;
    return true;
  };
  return m;
}

SpacetimeModel make_warped_ads(const Params& params) {
  no_params(params, "warped_ads");
  SpacetimeModel m;
  m.dim = 3;
  m.label = "warped_ads";
  m.params = params;
  // Coordinates (t, x, y).
  m.metric = [](const Vec& p) -> Mat {
    const double c = std::cosh(p[1]);
    Mat g = Mat::Zero(3, 3);
    g(0, 0) = -c * c;
    g(1, 1) = 1.0;
    g(2, 2) = c * c;
    return g;
  };
  m.tau = [](const Vec& p) {
    const double t = p[0];
    return t / std::cosh(p[1]) + t * t * t;
  };
  m.dtau = [](const Vec& p) -> Vec {
    const double t = p[0], c = std::cosh(p[1]);
    return make_point({1.0 / c + 3.0 * t * t, -t * std::sinh(p[1]) / (c * c), 0.0});
  };
  // g = cosh^2(x) (-dt^2 + dy^2 + du^2) with u = gd(x): Minkowski on a convex slab.
  m.causal_oracle = [](const Vec& p, const Vec& q) -> std::optional<bool> {
    const double dt = q[0] - p[0];
    const double du = gudermannian(q[1]) - gudermannian(p[1]);
    return causal_ge(dt, std::hypot(q[2] - p[2], du));
  };
  return m;
}

SpacetimeModel make_slice_incomplete(const Params& params) {
  no_params(params, "slice_incomplete_warp");
  SpacetimeModel m;
  m.dim = 2;
  m.label = "slice_incomplete_warp";
  m.params = params;
  m.metric = [](const Vec& p) -> Mat {
    const double f = 1.0 / (1.0 + p[1] * p[1]);
    Mat g = Mat::Zero(2, 2);
    g(0, 0) = -1.0;
    g(1, 1) = f * f;
    return g;
  };
  m.tau = [](const Vec& p) { return p[0]; };
  m.dtau = [](const Vec&) -> Vec { return make_point({1.0, 0.0}); };
  // u = arctan(x) makes the metric -dt^2 + du^2 on the strip |u| < pi/2.
  m.causal_oracle = [](const Vec& p, const Vec& q) -> std::optional<bool> {
    return causal_ge(q[0] - p[0], std::abs(std::atan(q[1]) - std::atan(p[1])));
  };
  m.nulldist_oracle = [](const Vec& p, const Vec& q) -> std::optional<double> {
    return std::max(std::abs(q[0] - p[0]), std::abs(std::atan(q[1]) - std::atan(p[1])));
  };
  return m;
}

}  // namespace

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {
      "minkowski", "minkowski_exp", "minkowski_sqrt",
      "slit_minkowski_cubic", "warped_ads", "slice_incomplete_warp"};
  return names;
}

SpacetimeModel catalog(const std::string& name, const Params& params) {
  if (name == "minkowski") return make_minkowski(params);
  if (name == "minkowski_exp") return make_minkowski_exp(params);
  if (name == "minkowski_sqrt") return make_minkowski_sqrt(params);
  if (name == "slit_minkowski_cubic") return make_slit(params);
  if (name == "warped_ads") return make_warped_ads(params);
  if (name == "slice_incomplete_warp") return make_slice_incomplete(params);
  throw Error(Errc::UnknownModel, "no catalog entry '" + name + "'");
}

SpacetimeModel conformal_rescale(const SpacetimeModel& m, double factor) {
  if (!(factor > 0.0)) throw Error(Errc::BadParams, "conformal factor must be positive");
  SpacetimeModel r = m;
  auto g = m.metric;
  r.metric = [g, factor](const Vec& x) -> Mat { return factor * g(x); };
  return r;
}

SpacetimeModel with_time_function(const SpacetimeModel& m, std::string label,
                                  std::function<double(const Vec&)> tau,
                                  std::function<Vec(const Vec&)> dtau) {
  SpacetimeModel r = m;
  r.label = std::move(label);
  r.tau = std::move(tau);
  r.dtau = std::move(dtau);
  r.nulldist_oracle = nullptr;
  return r;
}

}  // namespace nulldist

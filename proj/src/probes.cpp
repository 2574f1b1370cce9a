#include "nulldist/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "nulldist/report.hpp"

namespace nulldist {

const char* to_string(EscapeVerdict v) {
  return v == EscapeVerdict::incomplete_witness ? "incomplete_witness" : "none";
}

namespace {

double sup_norm(const Vec& x) { return x.cwiseAbs().maxCoeff(); }

void finish_escape(EscapeWitness& w, double eps) {
  const std::size_t n = w.increments.size();
  w.tail_sum = 0.0;
  for (std::size_t i = n / 2; i < n; ++i) w.tail_sum += w.increments[i];
  double earlier = 0.0;
  for (std::size_t i = 0; i + 1 < w.points.size(); ++i) earlier = std::max(earlier, sup_norm(w.points[i]));
  w.escaped = !w.points.empty() && sup_norm(w.points.back()) > earlier;
  w.verdict = w.tail_sum < eps && w.escaped ? EscapeVerdict::incomplete_witness : EscapeVerdict::none;
}

}  // namespace

EscapeWitness escape_probe(const SpacetimeModel& m, const Vec& base, const Vec& direction,
                           double horizon, double eps) {
  if (base.size() != m.dim || direction.size() != m.dim)
    throw Error(Errc::BadParams, "escape_probe: dimension mismatch");
  if (direction.isZero(0.0)) throw Error(Errc::ZeroVector, "escape_probe: zero direction");
  if (!(horizon >= 2.0) || !(eps > 0.0)) throw Error(Errc::BadParams, "escape_probe: S >= 2, eps > 0");
  const long n = static_cast<long>(std::floor(horizon));
  EscapeWitness w;
  w.ray = "base=" + fmt_point(base) + " direction=" + fmt_point(direction) + " gamma(s)=base+s*direction";
  w.horizon = horizon;
  Orientation dir = Orientation::none;
  for (long i = 0; i <= n; ++i) {
    Vec x = base + double(i) * direction;
    if (!m.in_domain(x)) throw Error(Errc::NotCausalRay, "escape_probe: ray leaves the domain");
    if (i > 0) {
      const CausalVerdict v = segment_causal(m, w.points.back(), x);
      if (v.status != CausalStatus::verified || (dir != Orientation::none && v.orientation != dir))
        throw Error(Errc::NotCausalRay, "escape_probe: step " + std::to_string(i) + " is not causal");
      dir = v.orientation;
      w.increments.push_back(std::abs(m.tau(x) - m.tau(w.points.back())));
    }
    w.points.push_back(std::move(x));
  }
  finish_escape(w, eps);
  return w;
}

EscapeWitness escape_sequence(const std::vector<Vec>& points, const PairBound& bound, double eps,
                              std::string description) {
  if (points.size() < 3) throw Error(Errc::BadParams, "escape_sequence: at least 3 points");
  if (!(eps > 0.0)) throw Error(Errc::BadParams, "escape_sequence: eps > 0");
  EscapeWitness w;
  w.ray = std::move(description);
  w.points = points;
  w.horizon = double(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) w.increments.push_back(bound(points[i], points[i + 1]));
  finish_escape(w, eps);
  return w;
}

PiecewisePath slice_bounce_path(const SpacetimeModel& m, const Vec& a, const Vec& b,
                                int segments_per_unit) {
  if (m.label != "slice_incomplete_warp")
    throw Error(Errc::BadParams, "slice_bounce_path needs slice_incomplete_warp");
  if (a[0] != b[0] || a[1] == b[1]) throw Error(Errc::BadParams, "slice_bounce_path: a, b on one slice");
  if (segments_per_unit < 1) throw Error(Errc::BadParams, "slice_bounce_path: segments_per_unit >= 1");
  constexpr double kSteep = 1.0 + 1e-6;
  const double span = b[1] - a[1];
  const long teeth = std::max(1L, static_cast<long>(std::ceil(std::abs(span) * segments_per_unit / 2.0)));
  std::vector<Vec> pts{a};
  for (long j = 0; j < teeth; ++j) {
    const double x0 = a[1] + span * double(j) / double(teeth);
    const double x1 = j + 1 == teeth ? b[1] : a[1] + span * double(j + 1) / double(teeth);
    // f = 1/(1+x^2) peaks where |x| is smallest on the tooth.
    const double xm = (x0 <= 0.0) != (x1 <= 0.0) ? 0.0 : std::min(std::abs(x0), std::abs(x1));
    const double dt = kSteep * std::abs(x1 - x0) / 2.0 / (1.0 + xm * xm);
    pts.push_back(make_point({a[0] + dt, 0.5 * (x0 + x1)}));
    pts.push_back(make_point({a[0], x1}));
  }
  return make_path(m, std::move(pts));
}

namespace {

constexpr int kBlock = 256;

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(block),
                    std::uint32_t(block >> 32)};
  return std::mt19937_64(seq);
}

// Splits `n` samples into fixed-size blocks with their own streams; results are
// concatenated in block order, so output does not depend on the thread count.
template <class F>
std::vector<PairSample> sample_blocks(int n, const ScanOptions& opts, F per_block) {
  const int blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<PairSample>> out(blocks);
  auto run = [&](int worker, int workers) {
    for (int b = worker; b < blocks; b += workers) {
      std::mt19937_64 rng = block_rng(opts.seed, std::uint64_t(b));
      out[b] = per_block(std::min(kBlock, n - b * kBlock), rng);
    }
  };
  const int workers = std::max(1, std::min(opts.threads, blocks));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& t : pool) t.join();
  }
  std::vector<PairSample> all;
  for (auto& v : out) all.insert(all.end(), v.begin(), v.end());
  return all;
}

std::optional<Vec> uniform_point(const SpacetimeModel& m, const Box& box, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
    if (m.in_domain(x)) return x;
  }
  return std::nullopt;
}

void check_region(const SpacetimeModel& m, const Box& box) {
  if (box.dim() != m.dim || box.hi.size() != m.dim)
    throw Error(Errc::BadParams, "scan region dimension mismatch");
  for (int i = 0; i < box.dim(); ++i)
    if (!(box.lo[i] < box.hi[i])) throw Error(Errc::EmptyRegion, "scan region is empty");
}

// Oracle verdict, else lattice reachability; nullopt if neither decides.
class CausalityCheck {
 public:
  CausalityCheck(const SpacetimeModel& m, const Box& region, double delta)
      : m_(m), region_(region), delta_(delta) {}

  bool future(const Vec& p, const Vec& q) {
    if (m_.causal_oracle)
      if (auto v = m_.causal_oracle(p, q)) return *v;
    std::lock_guard<std::mutex> lock(mu_);
    if (!lattice_) {
      LatticeSpec spec;
      spec.region = region_;
      for (int i = 0; i < region_.dim(); ++i) {
        const double cells = std::ceil((region_.hi[i] - region_.lo[i]) / delta_ - 1e-9);
        spec.region.hi[i] = region_.lo[i] + cells * delta_;
      }
      spec.spacing = delta_;
      lattice_ = build(m_, spec);
    }
    QueryOptions qo;
    qo.exact_endpoints = true;
    try {
      return future_reachable(*lattice_, p, q, qo);
    } catch (const Error&) {
      return false;
    }
  }

 private:
  const SpacetimeModel& m_;
  Box region_;
  double delta_;
  std::mutex mu_;
  std::optional<CausalLattice> lattice_;
};

// Random causal pair ordered so that q is in the causal future of p.
std::optional<std::pair<Vec, Vec>> causal_pair(const SpacetimeModel& m, const Box& box,
                                               CausalityCheck& check, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    auto p = uniform_point(m, box, rng);
    auto q = uniform_point(m, box, rng);
    if (!p || !q || *p == *q) continue;
    if (check.future(*p, *q)) return std::pair{*p, *q};
    if (check.future(*q, *p)) return std::pair{*q, *p};
  }
  return std::nullopt;
}

// v = e_0 + a e_i with g(v, v) = 0 and the given sign of a.
std::optional<Vec> null_direction(const Mat& g, int axis, int sign) {
  const double g00 = g(0, 0), g0i = g(0, axis), gii = g(axis, axis);
  const double disc = g0i * g0i - g00 * gii;
  if (!(gii > 0.0) || disc < 0.0) return std::nullopt;
  const double a = (-g0i + sign * std::sqrt(disc)) / gii;
  Vec v = Vec::Zero(g.rows());
  v[0] = 1.0;
  v[axis] = a;
  return v;
}

double chord_h_length(const AuxiliaryMetric& h, const Vec& p, const Vec& q) {
  const Vec v = q - p;
  if (h.constant) return std::sqrt(v.dot(h.evaluator(p) * v));
  constexpr int kPanels = 32;
  double acc = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const Vec x = p + ((i + 0.5) / kPanels) * v;
    acc += std::sqrt(v.dot(h.evaluator(x) * v));
  }
  return acc / kPanels;
}

std::vector<std::pair<Vec, Vec>> null_pairs(const SpacetimeModel& m, const Box& box,
                                            CausalityCheck& check) {
  std::vector<std::pair<Vec, Vec>> out;
  const Vec c = 0.5 * (box.lo + box.hi);
  if (!m.in_domain(c)) return out;
  const double reach = 0.25 * (box.hi - box.lo).minCoeff();
  for (int axis = 1; axis < m.dim; ++axis)
    for (int sign : {1, -1}) {
      auto v = null_direction(m.metric(c), axis, sign);
      if (!v) continue;
      const Vec d = (reach / sup_norm(*v)) * *v;
      Vec p = c - d, q = c + d;
      if (!m.in_domain(p) || !m.in_domain(q)) continue;
      if (m.tau(q) < m.tau(p)) std::swap(p, q);
      if (check.future(p, q)) out.emplace_back(p, q);
    }
  return out;
}

}  // namespace

AntiLipschitzResult anti_lipschitz_scan(const SpacetimeModel& m, const AuxiliaryMetric& h,
                                        const Box& region, int n_pairs, const ScanOptions& opts) {
  check_region(m, region);
  if (n_pairs < 0) throw Error(Errc::BadParams, "anti_lipschitz_scan: n_pairs >= 0");
  CausalityCheck check(m, region, opts.lattice_delta);
  auto ratio = [&](const Vec& p, const Vec& q) -> std::optional<PairSample> {
    const double dh = chord_h_length(h, p, q);
    if (!(dh > 0.0)) return std::nullopt;
    return PairSample{p, q, (m.tau(q) - m.tau(p)) / dh};
  };
  AntiLipschitzResult r;
  for (const auto& [p, q] : null_pairs(m, region, check))
    if (auto s = ratio(p, q)) r.samples.push_back(*s);
  auto random = sample_blocks(n_pairs, opts, [&](int count, std::mt19937_64& rng) {
    std::vector<PairSample> out;
    for (int i = 0; i < count; ++i)
      if (auto pq = causal_pair(m, region, check, rng))
        if (auto s = ratio(pq->first, pq->second)) out.push_back(*s);
    return out;
  });
  r.samples.insert(r.samples.end(), random.begin(), random.end());
  if (r.samples.empty()) throw Error(Errc::NoCausalPairs, "anti_lipschitz_scan: no causal pairs found");
  const auto it = std::min_element(r.samples.begin(), r.samples.end(),
                                   [](const PairSample& a, const PairSample& b) { return a.value < b.value; });
  r.inf_ratio = it->value;
  r.argmin_p = it->p;
  r.argmin_q = it->q;
  return r;
}

SteepnessResult steepness_scan(const SpacetimeModel& m, const AuxiliaryMetric& h, const Box& region,
                               int n_samples, const ScanOptions& opts) {
  check_region(m, region);
  if (n_samples < 1) throw Error(Errc::BadParams, "steepness_scan: n_samples >= 1");
  auto slack = [&](const Vec& x, Vec v) -> std::optional<PairSample> {
    if (!(v[0] > 0.0)) return std::nullopt;
    v /= v[0];
    const double d = m.dtau_at(x).dot(v);
    if (!(d > 0.0)) return std::nullopt;
    return PairSample{x, v, d - std::sqrt(v.dot(h.evaluator(x) * v))};
  };
  SteepnessResult r;
  r.samples = sample_blocks(n_samples, opts, [&](int count, std::mt19937_64& rng) {
    std::vector<PairSample> out;
    std::normal_distribution<double> normal;
    for (int i = 0; i < count; ++i) {
      auto x = uniform_point(m, region, rng);
      if (!x) continue;
      const Mat g = m.metric(*x);
      for (int axis = 1; axis < m.dim; ++axis)
        for (int sign : {1, -1})
          if (auto v = null_direction(g, axis, sign))
            if (auto s = slack(*x, *v)) out.push_back(*s);
      for (int attempt = 0; attempt < 64; ++attempt) {
        Vec v(m.dim);
        for (int k = 0; k < m.dim; ++k) v[k] = normal(rng);
        if (v.isZero(0.0)) continue;
        const VectorClass c = classify_vector(m, *x, v);
        if (c.causal_type == CausalType::spacelike) continue;
        if (c.orientation == Orientation::past) v = -v;
        if (auto s = slack(*x, v)) {
          out.push_back(*s);
          break;
        }
      }
    }
    return out;
  });
  if (r.samples.empty()) throw Error(Errc::EmptyRegion, "steepness_scan: no samples in the domain");
  const auto it = std::min_element(r.samples.begin(), r.samples.end(),
                                   [](const PairSample& a, const PairSample& b) { return a.value < b.value; });
  r.min_slack = it->value;
  r.argmin_point = it->p;
  r.argmin_vector = it->q;
  return r;
}

namespace {

BiLipschitzResult summarize_ratios(std::vector<PairSample> samples) {
  if (samples.empty()) throw Error(Errc::NoCausalPairs, "bilipschitz: no usable causal pairs");
  BiLipschitzResult r;
  const auto [lo, hi] = std::minmax_element(
      samples.begin(), samples.end(), [](const PairSample& a, const PairSample& b) { return a.value < b.value; });
  r.min_ratio = lo->value;
  r.argmin_p = lo->p;
  r.argmin_q = lo->q;
  r.max_ratio = hi->value;
  r.argmax_p = hi->p;
  r.argmax_q = hi->q;
  r.samples = std::move(samples);
  return r;
}

std::optional<PairSample> tau_ratio(const SpacetimeModel& m1, const SpacetimeModel& m2, const Vec& p,
                                    const Vec& q) {
  const double d1 = std::abs(m1.tau(q) - m1.tau(p));
  if (!(d1 > 0.0)) return std::nullopt;
  return PairSample{p, q, std::abs(m2.tau(q) - m2.tau(p)) / d1};
}

}  // namespace

BiLipschitzResult bilipschitz_scan(const SpacetimeModel& m1, const SpacetimeModel& m2,
                                   const Box& region, int n_pairs, const ScanOptions& opts) {
  check_region(m1, region);
  if (m1.dim != m2.dim) throw Error(Errc::BadParams, "bilipschitz_scan: dimension mismatch");
  if (n_pairs < 1) throw Error(Errc::BadParams, "bilipschitz_scan: n_pairs >= 1");
  CausalityCheck check(m1, region, opts.lattice_delta);
  return summarize_ratios(sample_blocks(n_pairs, opts, [&](int count, std::mt19937_64& rng) {
    std::vector<PairSample> out;
    for (int i = 0; i < count; ++i)
      if (auto pq = causal_pair(m1, region, check, rng))
        if (m2.in_domain(pq->first) && m2.in_domain(pq->second))
          if (auto s = tau_ratio(m1, m2, pq->first, pq->second)) out.push_back(*s);
    return out;
  }));
}

BiLipschitzResult bilipschitz_pairs(const SpacetimeModel& m1, const SpacetimeModel& m2,
                                    const std::vector<std::pair<Vec, Vec>>& pairs) {
  std::vector<PairSample> samples;
  for (const auto& [p, q] : pairs) {
    if (!m1.in_domain(p) || !m1.in_domain(q)) throw Error(Errc::OutOfDomain, "bilipschitz_pairs: pair");
    const bool causal = !m1.causal_oracle || m1.causal_oracle(p, q).value_or(true) ||
                        m1.causal_oracle(q, p).value_or(true);
    if (!causal) continue;
    if (auto s = tau_ratio(m1, m2, p, q)) samples.push_back(*s);
  }
  return summarize_ratios(std::move(samples));
}

void write_escape_csv(std::ostream& os, const EscapeWitness& w) {
  os << "step,point,increment\n";
  for (std::size_t i = 0; i < w.points.size(); ++i)
    os << i << ',' << fmt_point(w.points[i]) << ','
       << (i < w.increments.size() ? fmt_real(w.increments[i]) : std::string()) << '\n';
  write_footer(os, {{"ray", w.ray},
                    {"tail_sum", fmt_real(w.tail_sum)},
                    {"horizon", fmt_real(w.horizon)},
                    {"escaped", w.escaped ? "true" : "false"},
                    {"verdict", to_string(w.verdict)}});
}

void write_samples_csv(std::ostream& os, const std::vector<PairSample>& s, const std::string& value_name) {
  os << "p,q," << value_name << '\n';
  for (const PairSample& x : s) os << fmt_point(x.p) << ',' << fmt_point(x.q) << ',' << fmt_real(x.value) << '\n';
}

}  // namespace nulldist

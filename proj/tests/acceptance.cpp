// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "nulldist/distance.hpp"
#include "nulldist/probes.hpp"
#include "nulldist/relations.hpp"
#include "nulldist/scenario.hpp"
#include "nulldist/witness.hpp"
#include "support.hpp"

using namespace nulldist;
using testing::kPi;

namespace {

// Tolerances and budgets.
constexpr double kExactTol = 1e-9;            // 1: level-0 causal pairs
constexpr double kSpacelikeRelTol = 0.01;     // 2: within 1% of the oracle
constexpr double kQuadTol = 1e-6;             // 3: Wick sandwich quadrature
constexpr double kRatioTol = 1e-9;            // 4: ratio 3 for the unit segment
constexpr double kSimpleExcess = 7.5e-4;      // 6: witness upper - dtau at s = 10
constexpr double kTailEps = 1e-3;             // 7: escape tail
constexpr double kBounceBand = 1.02;          // 7: bounce length over the arctan increment
constexpr double kSlackTol = 1e-9;            // 8: steepness slack
constexpr double kAntiTol = 1e-6;             // 8: anti-Lipschitz ratio
constexpr double kNullSlackTol = 1e-3;        // 8: 1 - sqrt 2
constexpr double kSqrtRelTol = 0.05;          // 9: 1/sqrt(t)
constexpr double kPropTol = 1e-12;            // 10: relative rounding allowance

const double kBudget[] = {5, 30, 60, 5, 5, 30, 10, 10, 5, 120};

Vec P(double t, double x) { return make_point({t, x}); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int n, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < kBudget[n - 1];
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s criterion %2d: %s [%s; %.2fs/%.0fs%s]\n", ok ? "PASS" : "FAIL", n, title, o.detail.c_str(),
              secs, kBudget[n - 1], in_time ? "" : " over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome causal_pair_exactness() {
  const auto m = catalog("minkowski");
  std::mt19937_64 rng(kDefaultSeed);
  const Box box{P(-2, -2), P(2, 2)};
  EstimateOptions o;
  o.levels = 0;
  int pairs = 0, exact = 0, monotone = 0;
  Outcome out;
  while (pairs < 100) {
    Vec p = testing::uniform_point(rng, box), q = testing::uniform_point(rng, box);
    if (!*m.causal_oracle(p, q)) {
      if (!*m.causal_oracle(q, p)) continue;
      std::swap(p, q);
    }
    ++pairs;
    const double dtau = q[0] - p[0];
    const double upper = estimate(m, p, q, o).upper;
    LatticeSpec s;
    s.region = padded_region(p, q, default_padding(p, q, o), o.delta0);
    s.spacing = o.delta0;
    s.stencil_radius = o.stencil;
    QueryOptions qo;
    qo.exact_endpoints = true;
    const bool has_monotone = future_reachable(build(m, s), p, q, qo);
    const bool is_exact = std::abs(upper - dtau) <= kExactTol;
    monotone += has_monotone;
    exact += is_exact;
    if (upper < dtau - kExactTol || (has_monotone && !is_exact)) out.pass = false;
  }
  out.detail = std::to_string(exact) + "/100 exact, " + std::to_string(monotone) + " with monotone path";
  return out;
}

Outcome spacelike_minkowski() {
  const auto m = catalog("minkowski");
  EstimateOptions o;
  o.delta0 = 1.0;
  o.levels = 6;
  o.stop_when_converged = false;
  o.region = Box{P(-1, -0.5), P(2, 1.5)};
  const double oracle = *exact_oracle(m, P(0, 0), P(0, 1));
  const double upper = estimate(m, P(0, 0), P(0, 1), o).upper;
  const double d = 1.0 / 16;
  const double brute = testing::brute_force_minkowski(m, o.region->lo, 49, 33, d, o.stencil, 16, 8, 16, 24);
  Outcome out;
  out.pass = std::abs(upper - oracle) <= kSpacelikeRelTol * oracle && std::abs(brute - oracle) <= kExactTol;
  out.detail = "upper " + fmt("%.12g", upper) + ", brute force at 2^-4 " + fmt("%.12g", brute);
  return out;
}

Outcome wick_sandwich() {
  std::mt19937_64 rng(kDefaultSeed);
  int violations = 0, total = 0;
  double worst = 0.0;
  for (const auto& name : catalog_names()) {
    const auto m = catalog(name);
    for (int i = 0; i < 1000; ++i) {
      const auto path = testing::random_causal_path(m, rng, 1 + i % 8);
      const double lt = null_length(m, path), lw = wick_length(m, path);
      const double tol = kQuadTol * (1.0 + lt);
      const double excess = std::max(lt - lw, lw - std::sqrt(2.0) * lt);
      worst = std::max(worst, excess);
      if (excess > tol) ++violations;
      ++total;
    }
  }
  return {violations == 0,
          std::to_string(violations) + " violations over " + std::to_string(total) + " paths, worst excess " +
              fmt("%.3g", worst)};
}

Outcome wick2_construction() {
  const auto m = catalog("minkowski");
  PiecewisePath gamma;
  gamma.breakpoints = {P(0, 0), P(0, 1)};
  gamma.orientations = {Orientation::none};
  const double lw = wick_segment_length(m, gamma.breakpoints[0], gamma.breakpoints[1]);
  Outcome out;
  std::string ratios;
  for (int n = 0; n <= 6; ++n) {
    const auto w = wick2_deformation(m, gamma, n);
    const double r = w.null_len / lw;
    const bool ok = w.verified && verify_causal(m, w.path).status == CausalStatus::verified && r >= 2.0 &&
                    r <= 4.0 && w.null_len <= w.paper_bound && std::abs(r - 3.0) <= kRatioTol;
    out.pass = out.pass && ok;
    ratios += (n ? "," : "") + fmt("%.12g", r);
  }
  out.detail = "ratios " + ratios;
  return out;
}

Outcome counterexK_reproduction() {
  const auto m = catalog("slit_minkowski_cubic");
  const Vec p = P(1, 1), q = P(-1, 1);
  Outcome out;
  const auto j = jplus_verdict(m, q, p);
  out.pass = j.first == JPlus::no && j.second == JSource::oracle;
  std::string ex;
  for (long k : {10L, 100L, 1000L}) {
    const auto w = counterexK_witness(1, 1, -1, 1, k);
    const double excess = w.null_len - 2.0;
    out.pass = out.pass && excess <= 28.0 / double(k * k) && w.verified;
    ex += (k == 10 ? "" : ",") + fmt("%.4g", excess);
  }
  EncodingOptions o;
  o.lattice_estimate = false;
  o.extra_bounds.push_back([&](const Vec& a, const Vec& b) { return witness_upper_bound(m, a, b); });
  const auto rep = encoding_report(m, {{q, p}}, o);
  out.pass = out.pass && rep.flag == EncodingFlag::violates;
  out.detail = std::string("J+ ") + to_string(j.first) + "/" + to_string(j.second) + ", excess " + ex + ", " +
               to_string(rep.flag);
  return out;
}

Outcome counterexsimple_reproduction() {
  const auto m = catalog("warped_ads");
  const Vec p = make_point({-kPi / 2, 0, 0}), q = make_point({kPi / 2, 0, 4});
  const double dtau = m.tau(q) - m.tau(p);
  Outcome out;
  out.pass = std::abs(dtau - (kPi + kPi * kPi * kPi / 4)) <= 1e-12;
  const auto w = counterexsimple_witness(0, 4, 10.0, 10000);
  const double excess = w.null_len - dtau;
  out.pass = out.pass && excess <= kSimpleExcess && w.verified;
  const auto j = jplus_verdict(m, p, q);
  out.pass = out.pass && j.first == JPlus::no && j.second == JSource::oracle;
  EncodingOptions o;
  o.lattice_estimate = false;
  o.extra_bounds.push_back([&](const Vec& a, const Vec& b) { return witness_upper_bound(m, a, b); });
  const auto rep = encoding_report(m, {{p, q}}, o);
  out.pass = out.pass && rep.flag == EncodingFlag::violates;
  EstimateOptions eo;
  eo.delta0 = 0.5;
  eo.levels = 1;
  eo.axis_pad = make_point({0.5, 1.0, 0.5});
  eo.stop_when_converged = false;
  DivergenceProbe probe;
  probe.level = 0;
  probe.axes = {1};
  probe.pad_factors = {1, 2, 4, 8};
  const auto conv = convergence_report(m, p, q, eo, probe);
  out.pass = out.pass && conv.divergent_region;
  out.detail = "dtau " + fmt("%.10g", dtau) + ", excess " + fmt("%.4g", excess) + ", " + to_string(rep.flag) +
               ", " + conv.flags();
  return out;
}

Outcome completeness_probes() {
  const auto a = escape_probe(catalog("minkowski_exp"), P(0, 0), P(-1, 0), 16, kTailEps);
  const auto b = escape_probe(catalog("minkowski"), P(0, 0), P(-1, 0), 16, kTailEps);
  const auto slice = catalog("slice_incomplete_warp");
  std::vector<Vec> pts;
  for (int n = 0; n <= 1024; ++n) pts.push_back(P(0, n));
  bool bounds_ok = true;
  const auto c = escape_sequence(pts, [&](const Vec& x, const Vec& y) {
    const double v = null_length(slice, slice_bounce_path(slice, x, y));
    const double exact = std::atan(y[1]) - std::atan(x[1]);
    bounds_ok = bounds_ok && v >= exact && v <= exact * kBounceBand + 1e-12;
    return v;
  }, kTailEps);
  Outcome out;
  out.pass = a.verdict == EscapeVerdict::incomplete_witness && a.tail_sum < kTailEps &&
             b.verdict == EscapeVerdict::none && c.verdict == EscapeVerdict::incomplete_witness && bounds_ok;
  out.detail = "(a) tail " + fmt("%.4g", a.tail_sum) + " " + to_string(a.verdict) + ", (b) " + to_string(b.verdict) +
               ", (c) tail " + fmt("%.4g", c.tail_sum) + " " + to_string(c.verdict);
  return out;
}

Outcome steepness_chain() {
  const auto m = catalog("minkowski");
  const Box box{P(-1, -1), P(1, 1)};
  const auto half = euclidean_metric(2, 0.5);
  const double slack = steepness_scan(m, half, box, 1000).min_slack;
  const double ratio = anti_lipschitz_scan(m, half, box, 1000).inf_ratio;
  const double full = steepness_scan(m, euclidean_metric(2), box, 1000).min_slack;
  Outcome out;
  out.pass = slack >= -kSlackTol && ratio >= 1.0 - kAntiTol && std::abs(full - (1.0 - std::sqrt(2.0))) <= kNullSlackTol;
  out.detail = "slack " + fmt("%.3g", slack) + ", ratio " + fmt("%.12g", ratio) + ", euclidean slack " +
               fmt("%.12g", full);
  return out;
}

Outcome non_lipschitz() {
  const auto r = bilipschitz_pairs(catalog("minkowski"), catalog("minkowski_sqrt"),
                                   {{P(0, 0), P(1e-2, 0)}, {P(0, 0), P(1e-4, 0)}});
  Outcome out;
  out.pass = r.samples.size() == 2 && std::abs(r.samples[0].value / 10.0 - 1.0) <= kSqrtRelTol &&
             std::abs(r.samples[1].value / 100.0 - 1.0) <= kSqrtRelTol;
  out.detail = "ratios " + fmt("%.10g", r.samples.at(0).value) + ", " + fmt("%.10g", r.samples.at(1).value);
  return out;
}

LatticeSpec catalog_spec(const SpacetimeModel& m, double delta) {
  LatticeSpec s;
  s.region = testing::sample_box(m);
  s.spacing = delta;
  return s;
}

std::string body_of(const std::string& path) {
  std::ifstream in(path);
  std::string line, out;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

Outcome property_suites() {
  std::mt19937_64 rng(kDefaultSeed);
  int axioms = 0, conformal = 0, reverse = 0, refinement = 0, determinism = 0, checks = 0;
  for (const auto& name : catalog_names()) {
    const auto m = catalog(name);
    const auto fine = build(m, catalog_spec(m, 0.25));
    const auto coarse = build(m, catalog_spec(m, 0.5));
    const auto scaled = build(conformal_rescale(m, 5.0), catalog_spec(m, 0.25));
    std::uniform_int_distribution<std::size_t> pick(0, coarse.node_count() - 1);
    for (int i = 0; i < 40; ++i) {
      const Vec a = coarse.node(pick(rng)), b = coarse.node(pick(rng)), c = coarse.node(pick(rng));
      double ab, ba, bc, ac, ab_coarse;
      try {
        ab = null_shortest_path(fine, a, b).value;
        ba = null_shortest_path(fine, b, a).value;
        bc = null_shortest_path(fine, b, c).value;
        ac = null_shortest_path(fine, a, c).value;
        ab_coarse = null_shortest_path(coarse, a, b).value;
      } catch (const Error& e) {
        if (e.code() != Errc::Unreachable) throw;
        continue;
      }
      checks += 4;
      const double tol = kPropTol * (1.0 + ab + bc);
      const double dtau = std::abs(m.tau(b) - m.tau(a));
      if (ab != ba || (a != b && !(ab > 0.0)) || ac > ab + bc + tol || ab < dtau - tol) ++axioms;
      if (null_shortest_path(scaled, a, b).value != ab) ++conformal;
      if (ab > ab_coarse + tol) ++refinement;
    }
    for (int i = 0; i < 100; ++i) {
      const auto path = testing::random_causal_path(m, rng, 4);
      const double len = null_length(m, path);
      const double dtau = std::abs(m.tau(path.breakpoints.back()) - m.tau(path.breakpoints.front()));
      bool monotone = true;
      for (auto o : path.orientations) monotone = monotone && o == path.orientations[0];
      if (len < dtau - kPropTol * (1.0 + dtau) || (monotone && std::abs(len - dtau) > kPropTol * (1.0 + dtau)))
        ++reverse;
      if (verify_causal(conformal_rescale(m, 5.0), path).status != CausalStatus::verified) ++conformal;
    }
  }

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "nulldist_acceptance";
  fs::create_directories(dir);
  std::ostringstream sink;
  for (const auto& name : catalog_names()) {
    const bool three = catalog(name).dim == 3;
    const std::string text = "[model]\nname = " + name + "\n[points]\np = " + (three ? "0.5, 0, 0" : "0.5, -0.5") +
                             "\nq = " + (three ? "1, 0.5, 0" : "1, 0") +
                             "\n[lattice]\ndelta = 0.5\nlevels = 1\nregion_pad = 0.5\n";
    std::string bodies[2];
    for (int run = 0; run < 2; ++run) {
      ScenarioOverrides ov;
      ov.out = (dir / (name + std::to_string(run))).string();
      ov.threads = run + 1;
      const int rc = run_scenario(make_scenario("estimate", ConfigFile::parse(text), ov), sink, sink);
      if (rc != kExitOk) ++determinism;
      bodies[run] = body_of(*ov.out + "_estimate.csv");
    }
    if (bodies[0].empty() || bodies[0] != bodies[1]) ++determinism;
  }
  const std::string scan = "[model]\nname = minkowski_exp\n[probe]\nkind = anti_lipschitz\nregion_lo = -1, -1\n"
                           "region_hi = 1, 1\nsamples = 500\n";
  std::string scans[2];
  for (int run = 0; run < 2; ++run) {
    ScenarioOverrides ov;
    ov.out = (dir / ("scan" + std::to_string(run))).string();
    ov.threads = 1 + 3 * run;
    if (run_scenario(make_scenario("probe", ConfigFile::parse(scan), ov), sink, sink) != kExitOk) ++determinism;
    scans[run] = body_of(*ov.out + "_probe.csv");
  }
  if (scans[0].empty() || scans[0] != scans[1]) ++determinism;
  fs::remove_all(dir);

  Outcome out;
  out.pass = axioms + conformal + reverse + refinement + determinism == 0 && checks > 0;
  out.detail = "violations: axioms " + std::to_string(axioms) + ", conformal " + std::to_string(conformal) +
               ", reverse triangle " + std::to_string(reverse) + ", refinement " + std::to_string(refinement) +
               ", determinism " + std::to_string(determinism) + " (" + std::to_string(checks) + " lattice checks)";
  return out;
}

}  // namespace

int main() {
  report(1, "causal-pair exactness on minkowski", causal_pair_exactness);
  report(2, "spacelike minkowski value", spacelike_minkowski);
  report(3, "Wick sandwich on the catalog", wick_sandwich);
  report(4, "Wick deformation of the unit segment", wick2_construction);
  report(5, "slit counterexample", counterexK_reproduction);
  report(6, "warped counterexample", counterexsimple_reproduction);
  report(7, "completeness probes", completeness_probes);
  report(8, "steepness and anti-Lipschitz chain", steepness_chain);
  report(9, "non-Lipschitz time function", non_lipschitz);
  report(10, "property suites", property_suites);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

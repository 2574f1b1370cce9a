#include "nulldist/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "nulldist/distance.hpp"
#include "nulldist/probes.hpp"
#include "nulldist/relations.hpp"
#include "nulldist/report.hpp"
#include "nulldist/witness.hpp"

namespace nulldist {

int exit_code_for(Errc e) {
  switch (e) {
    case Errc::Unreachable:
    case Errc::TooLarge:
    case Errc::SnapFailed:
    case Errc::NotCausal:
    case Errc::NoCausalPairs:
      return kExitNumerical;
    default:
      return kExitInvalid;
  }
}

namespace {

Error invalid(const std::string& what) { return Error(Errc::Config, what); }

double positive(std::optional<double> v, double fallback, const std::string& what) {
  const double x = v.value_or(fallback);
  if (!(x > 0.0) || !std::isfinite(x)) throw invalid(what + " must be positive");
  return x;
}

long positive_int(std::optional<long> v, long fallback, const std::string& what) {
  const long x = v.value_or(fallback);
  if (x < 1) throw invalid(what + " must be a positive integer");
  return x;
}

std::vector<long> positive_ints(const ConfigFile& f, const std::string& sec, const std::string& key,
                                std::vector<long> fallback) {
  auto vals = f.reals(sec, key);
  if (!vals) return fallback;
  std::vector<long> out;
  for (double v : *vals) {
    if (!(v >= 1.0) || v != std::floor(v)) throw invalid(key + " values must be positive integers");
    out.push_back(static_cast<long>(v));
  }
  return out;
}

SpacetimeModel model_from(const ConfigFile& f, const std::optional<std::string>& fallback = {}) {
  auto name = f.str("model", "name");
  if (!name) name = fallback;
  if (!name) throw invalid("[model] name is required");
  Params params;
  if (const auto* sec = f.section("model"))
    for (const auto& [key, values] : *sec)
      if (key != "name") {
        if (values.size() != 1) throw invalid("model parameter '" + key + "' given more than once");
        params[key] = parse_real(values.front());
      }
  return catalog(*name, params);
}

void check_dim(const SpacetimeModel& m, const Vec& x, const std::string& what) {
  if (x.size() != m.dim)
    throw invalid(what + " has " + std::to_string(x.size()) + " coordinates, model " + m.label + " needs " +
                  std::to_string(m.dim));
}

Box read_box(const ConfigFile& f, const SpacetimeModel& m, const std::string& sec, const std::string& lo_key,
             const std::string& hi_key) {
  auto lo = f.point(sec, lo_key);
  auto hi = f.point(sec, hi_key);
  if (!lo || !hi) throw invalid("[" + sec + "] " + lo_key + " and " + hi_key + " are required");
  check_dim(m, *lo, lo_key);
  check_dim(m, *hi, hi_key);
  for (Eigen::Index i = 0; i < lo->size(); ++i)
    if (!((*lo)[i] < (*hi)[i])) throw invalid("[" + sec + "] " + lo_key + " must be below " + hi_key);
  return {*lo, *hi};
}

EstimateOptions estimate_options(const ConfigFile& f, const SpacetimeModel& m, int threads) {
  EstimateOptions o;
  o.delta0 = positive(f.real("lattice", "delta"), 1.0, "delta");
  const long levels = f.integer("lattice", "levels").value_or(6);
  if (levels < 0 || levels > 20) throw invalid("levels must lie in [0, 20]");
  o.levels = static_cast<int>(levels);
  const long stencil = f.integer("lattice", "stencil").value_or(2);
  if (stencil < 1 || stencil > 4) throw invalid("stencil must lie in [1, 4]");
  o.stencil = static_cast<int>(stencil);
  o.conv_tol = positive(f.real("lattice", "conv_tol"), 1e-3, "conv_tol");
  if (auto pad = f.real("lattice", "region_pad")) o.region_pad = positive(pad, 1.0, "region_pad");
  if (auto pad = f.point("lattice", "axis_pad")) {
    check_dim(m, *pad, "axis_pad");
    if ((pad->array() < 0.0).any()) throw invalid("axis_pad entries must be non-negative");
    o.axis_pad = *pad;
  }
  if (f.has("lattice", "region_lo") || f.has("lattice", "region_hi"))
    o.region = read_box(f, m, "lattice", "region_lo", "region_hi");
  o.node_cap = static_cast<std::size_t>(positive_int(f.integer("lattice", "node_cap"), 5'000'000, "node_cap"));
  o.exact_endpoints = f.boolean("lattice", "exact_endpoints").value_or(true);
  o.threads = threads;
  o.stop_when_converged = false;
  return o;
}

DivergenceProbe divergence_probe(const ConfigFile& f, const SpacetimeModel& m) {
  DivergenceProbe d;
  const long level = f.integer("lattice", "probe_level").value_or(1);
  if (level < 0 || level > 20) throw invalid("probe_level must lie in [0, 20]");
  d.level = static_cast<int>(level);
  if (auto fac = f.reals("lattice", "probe_factors")) {
    for (double x : *fac)
      if (!(x > 0.0)) throw invalid("probe_factors must be positive");
    d.pad_factors = *fac;
  }
  if (auto axes = f.reals("lattice", "probe_axes"))
    for (double a : *axes) {
      if (a != std::floor(a) || a < 0 || a >= m.dim) throw invalid("probe_axes entries must be axis indices");
      d.axes.push_back(static_cast<int>(a));
    }
  return d;
}

std::vector<std::pair<Vec, Vec>> read_pairs(const ConfigFile& f, const SpacetimeModel& m, std::uint64_t seed) {
  std::vector<std::pair<Vec, Vec>> pairs;
  auto p = f.point("points", "p");
  auto q = f.point("points", "q");
  if (p.has_value() != q.has_value()) throw invalid("[points] p and q come together");
  if (p) pairs.emplace_back(*p, *q);
  for (const auto& list : f.point_lists("points", "pair")) {
    if (list.size() != 2) throw invalid("[points] pair takes two points separated by ';'");
    pairs.emplace_back(list[0], list[1]);
  }
  if (auto n = f.integer("points", "random_pairs")) {
    if (*n < 1) throw invalid("random_pairs must be positive");
    const Box box = read_box(f, m, "points", "random_lo", "random_hi");
    std::mt19937_64 rng(seed);
    for (long i = 0; i < *n; ++i) {
      Vec a(m.dim), b(m.dim);
      for (int k = 0; k < m.dim; ++k) {
        std::uniform_real_distribution<double> u(box.lo[k], box.hi[k]);
        a[k] = u(rng);
        b[k] = u(rng);
      }
      if (!m.in_domain(a) || !m.in_domain(b)) continue;
      if (m.tau(b) < m.tau(a)) std::swap(a, b);
      pairs.emplace_back(a, b);
    }
  }
  for (const auto& [a, b] : pairs) {
    check_dim(m, a, "point");
    check_dim(m, b, "point");
  }
  return pairs;
}

// Header plus body, written in one go so failures leave no partial report.
void emit_report(const ScenarioConfig& cfg, const std::string& model, const std::string& body,
                 const std::string& suffix = "") {
  const std::string path = cfg.out + "_" + cfg.command + suffix + ".csv";
  std::ofstream os(path);
  if (!os) throw invalid("cannot write report '" + path + "'");
  ReportHeader h;
  h.command = cfg.command;
  h.config_hash = sha256_hex(cfg.file.canonical());
  h.seed = cfg.seed;
  h.extra["model"] = model;
  write_header(os, h);
  os << body;
}

int run_estimate(const ScenarioConfig& cfg, std::ostream& log) {
  const SpacetimeModel m = model_from(cfg.file);
  const auto pairs = read_pairs(cfg.file, m, cfg.seed);
  if (pairs.empty()) throw invalid("estimate needs [points] p, q or pair entries");
  const EstimateOptions opts = estimate_options(cfg.file, m, cfg.threads);
  const DivergenceProbe probe = divergence_probe(cfg.file, m);
  std::ostringstream body;
  bool violation = false;
  std::map<std::string, std::string> footer;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [p, q] = pairs[i];
    const ConvergenceReport rep = convergence_report(m, p, q, opts, probe);
    write_convergence_csv(body, rep, i == 0);
    const double upper = rep.rows.empty() ? 0.0 : rep.rows.back().upper;
    const double lower = rep.rows.empty() ? 0.0 : rep.rows.back().lower;
    footer["pair" + std::to_string(i) + ".upper"] = fmt_real(upper);
    footer["pair" + std::to_string(i) + ".flags"] = rep.flags();
    log << "pair " << i << ": upper=" << fmt_real(upper) << " lower=" << fmt_real(lower) << ' ' << rep.flags()
        << '\n';
    if (cfg.check) {
      for (const ConvergenceRow& row : rep.rows)
        if (row.reachable && row.upper < row.lower - 1e-9 * (1.0 + std::abs(row.lower))) violation = true;
      if (auto exact = exact_oracle(m, p, q))
        if (std::isfinite(upper) && upper < *exact - 1e-9 * (1.0 + *exact)) violation = true;
    }
  }
  footer["pairs"] = std::to_string(pairs.size());
  write_footer(body, footer);
  emit_report(cfg, m.label, body.str());
  return violation ? kExitViolation : kExitOk;
}

int run_encode(const ScenarioConfig& cfg, std::ostream& log) {
  const SpacetimeModel m = model_from(cfg.file);
  const auto pairs = read_pairs(cfg.file, m, cfg.seed);
  if (pairs.empty()) throw invalid("encode needs [points] entries");
  EncodingOptions opts;
  opts.estimate = estimate_options(cfg.file, m, cfg.threads);
  opts.estimate.stop_when_converged = true;
  if (auto tol = cfg.file.real("tolerances", "rhat")) opts.tol = positive(tol, 0.0, "rhat");
  opts.extra_bounds.push_back([&m](const Vec& p, const Vec& q) { return witness_upper_bound(m, p, q); });
  const EncodingReport rep = encoding_report(m, pairs, opts);
  std::ostringstream body;
  write_encoding_csv(body, m, rep);
  write_footer(body, {{"flag", to_string(rep.flag)}, {"pairs", std::to_string(rep.rows.size())}});
  emit_report(cfg, m.label, body.str());
  log << "encoding " << to_string(rep.flag) << " over " << rep.rows.size() << " pairs\n";
  if (cfg.check)
    for (const RelationVerdict& v : rep.rows)
      if (v.j_plus == JPlus::yes && !v.r_hat) return kExitViolation;
  return kExitOk;
}

int run_witness(const ScenarioConfig& cfg, std::ostream& log) {
  const ConfigFile& f = cfg.file;
  const std::string kind = f.str("witness", "kind").value_or("");
  std::vector<WitnessResult> rows;
  std::string model;
  if (kind == "counterexK") {
    model = "slit_minkowski_cubic";
    for (long k : positive_ints(f, "witness", "k", {10, 100, 1000}))
      rows.push_back(counterexK_witness(f.real("witness", "t_p").value_or(1.0), f.real("witness", "x_p").value_or(1.0),
                                        f.real("witness", "t_q").value_or(-1.0), f.real("witness", "x_q").value_or(1.0), k));
  } else if (kind == "counterexsimple") {
    model = "warped_ads";
    const auto ss = f.reals("witness", "s").value_or(std::vector<double>{10.0});
    for (double s : ss)
      for (long k : positive_ints(f, "witness", "k", {10000}))
        rows.push_back(counterexsimple_witness(f.real("witness", "y_p").value_or(0.0),
                                               f.real("witness", "y_q").value_or(4.0), s, k));
  } else if (kind == "wick2") {
    const SpacetimeModel m = model_from(f, std::string("minkowski"));
    model = m.label;
    auto lists = f.point_lists("witness", "gamma");
    std::vector<Vec> gpts = lists.empty() ? std::vector<Vec>{make_point({0.0, 0.0}), make_point({0.0, 1.0})}
                                          : lists.front();
    if (lists.size() > 1) throw invalid("[witness] gamma given more than once");
    for (const Vec& x : gpts) check_dim(m, x, "gamma point");
    PiecewisePath gamma;
    gamma.breakpoints = gpts;
    gamma.orientations.assign(gpts.size() - 1, Orientation::none);
    std::vector<long> ns;
    if (auto v = f.reals("witness", "n"))
      for (double n : *v) {
        if (n < 0 || n != std::floor(n)) throw invalid("n values must be non-negative integers");
        ns.push_back(static_cast<long>(n));
      }
    else
      ns = {0, 1, 2, 3, 4, 5, 6};
    for (long n : ns) rows.push_back(wick2_deformation(m, gamma, static_cast<int>(n)));
  } else if (kind == "bounce") {
    const SpacetimeModel m = model_from(f);
    model = m.label;
    const auto pairs = read_pairs(f, m, cfg.seed);
    if (pairs.size() != 1) throw invalid("bounce needs exactly one [points] pair");
    for (long k : positive_ints(f, "witness", "k", {1, 4, 16}))
      rows.push_back(minkowski_bounce(m, pairs[0].first, pairs[0].second, static_cast<int>(k)));
  } else {
    throw invalid("[witness] kind must be counterexK, counterexsimple, wick2 or bounce");
  }
  std::ostringstream body;
  write_sweep_csv(body, rows);
  double min_slack = std::numeric_limits<double>::infinity();
  bool all_verified = true;
  for (const WitnessResult& r : rows) {
    min_slack = std::min(min_slack, r.slack);
    all_verified = all_verified && r.verified;
  }
  write_footer(body, {{"kind", kind}, {"rows", std::to_string(rows.size())}, {"min_slack", fmt_real(min_slack)},
                      {"verified", all_verified ? "true" : "false"}});
  emit_report(cfg, model, body.str());
  if (!rows.empty()) {
    std::ostringstream path;
    write_path_csv(path, rows.back().path);
    emit_report(cfg, model, path.str(), "_path");
  }
  log << "witness " << kind << ": " << rows.size() << " rows, min slack " << fmt_real(min_slack) << '\n';
  if (cfg.check && (!(min_slack >= -1e-9) || !all_verified)) return kExitViolation;
  return kExitOk;
}

AuxiliaryMetric h_metric(const ConfigFile& f, const SpacetimeModel& m) {
  return euclidean_metric(m.dim, positive(f.real("probe", "h_scale"), 1.0, "h_scale"));
}

int run_probe(const ScenarioConfig& cfg, std::ostream& log) {
  const ConfigFile& f = cfg.file;
  const std::string kind = f.str("probe", "kind").value_or("");
  ScanOptions so;
  so.seed = cfg.seed;
  so.threads = cfg.threads;
  std::ostringstream body;
  double value = 0.0;
  std::string value_name;
  std::string model;
  if (kind == "escape" || kind == "sequence") {
    const double eps = positive(f.real("probe", "eps"), 1e-3, "eps");
    EscapeWitness w;
    if (kind == "escape") {
      const SpacetimeModel m = model_from(f);
      model = m.label;
      auto base = f.point("probe", "base");
      auto dir = f.point("probe", "direction");
      if (!base || !dir) throw invalid("[probe] base and direction are required");
      check_dim(m, *base, "base");
      check_dim(m, *dir, "direction");
      w = escape_probe(m, *base, *dir, positive(f.real("probe", "horizon"), 16.0, "horizon"), eps);
    } else {
      const SpacetimeModel m = model_from(f, std::string("slice_incomplete_warp"));
      model = m.label;
      const Vec base = f.point("probe", "seq_base").value_or(make_point({0.0, 0.0}));
      const Vec step = f.point("probe", "seq_step").value_or(make_point({0.0, 1.0}));
      check_dim(m, base, "seq_base");
      check_dim(m, step, "seq_step");
      const long count = positive_int(f.integer("probe", "seq_count"), 1024, "seq_count");
      const int per_unit = static_cast<int>(positive_int(f.integer("probe", "segments_per_unit"), 64, "segments_per_unit"));
      std::vector<Vec> pts;
      for (long i = 0; i <= count; ++i) pts.push_back(base + double(i) * step);
      w = escape_sequence(
          pts,
          [&](const Vec& a, const Vec& b) { return null_length_unchecked(m, slice_bounce_path(m, a, b, per_unit)); },
          eps, "sequence base=" + fmt_point(base) + " step=" + fmt_point(step));
    }
    write_escape_csv(body, w);
    value = w.tail_sum;
    value_name = "tail_sum";
    log << "escape verdict " << to_string(w.verdict) << " tail_sum=" << fmt_real(w.tail_sum) << '\n';
  } else if (kind == "anti_lipschitz" || kind == "steepness" || kind == "bilipschitz") {
    const SpacetimeModel m = model_from(f);
    model = m.label;
    const long samples = positive_int(f.integer("probe", "samples"), 1000, "samples");
    std::map<std::string, std::string> footer;
    if (kind == "bilipschitz") {
      const std::string tau2 = f.str("probe", "tau2").value_or("");
      if (tau2.empty()) throw invalid("[probe] tau2 names the second model");
      const SpacetimeModel m2 = catalog(tau2);
      if (m2.dim != m.dim) throw invalid("tau2 model dimension differs");
      const auto pairs = read_pairs(f, m, cfg.seed);
      const BiLipschitzResult r = pairs.empty()
                                      ? bilipschitz_scan(m, m2, read_box(f, m, "probe", "region_lo", "region_hi"),
                                                         static_cast<int>(samples), so)
                                      : bilipschitz_pairs(m, m2, pairs);
      write_samples_csv(body, r.samples, "ratio");
      footer = {{"min_ratio", fmt_real(r.min_ratio)}, {"max_ratio", fmt_real(r.max_ratio)},
                {"tau2", tau2}};
      value = r.min_ratio;
      value_name = "min_ratio";
    } else {
      const Box region = read_box(f, m, "probe", "region_lo", "region_hi");
      const AuxiliaryMetric h = h_metric(f, m);
      if (kind == "anti_lipschitz") {
        const AntiLipschitzResult r = anti_lipschitz_scan(m, h, region, static_cast<int>(samples), so);
        write_samples_csv(body, r.samples, "ratio");
        footer = {{"inf_ratio", fmt_real(r.inf_ratio)}, {"argmin_p", fmt_point(r.argmin_p)},
                  {"argmin_q", fmt_point(r.argmin_q)}};
        value = r.inf_ratio;
        value_name = "inf_ratio";
      } else {
        const SteepnessResult r = steepness_scan(m, h, region, static_cast<int>(samples), so);
        write_samples_csv(body, r.samples, "slack");
        footer = {{"min_slack", fmt_real(r.min_slack)}, {"argmin_point", fmt_point(r.argmin_point)},
                  {"argmin_vector", fmt_point(r.argmin_vector)}};
        value = r.min_slack;
        value_name = "min_slack";
      }
    }
    footer["kind"] = kind;
    write_footer(body, footer);
    log << kind << ' ' << value_name << '=' << fmt_real(value) << '\n';
  } else {
    throw invalid("[probe] kind must be escape, sequence, anti_lipschitz, steepness or bilipschitz");
  }
  emit_report(cfg, model, body.str());
  if (cfg.check) {
    if (auto lo = f.real("tolerances", "expect_min"); lo && !(value >= *lo)) return kExitViolation;
    if (auto hi = f.real("tolerances", "expect_max"); hi && !(value <= *hi)) return kExitViolation;
  }
  return kExitOk;
}

}  // namespace

ScenarioConfig make_scenario(const std::string& command, ConfigFile file, const ScenarioOverrides& ov) {
  static const std::vector<std::string> commands{"estimate", "encode", "witness", "probe", "catalog-list"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end())
    throw invalid("unknown command '" + command + "'");
  ScenarioConfig cfg;
  cfg.command = command;
  cfg.seed = ov.seed ? *ov.seed : file.u64("run", "seed").value_or(kDefaultSeed);
  cfg.out = ov.out ? *ov.out : file.str("run", "out").value_or("nulldist");
  if (cfg.out.empty()) throw invalid("output prefix is empty");
  const long threads = ov.threads ? *ov.threads : file.integer("run", "threads").value_or(1);
  if (threads < 1 || threads > 1024) throw invalid("threads must lie in [1, 1024]");
  cfg.threads = static_cast<int>(threads);
  cfg.check = ov.check;
  cfg.file = std::move(file);
  return cfg;
}

int run_scenario(const ScenarioConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    if (cfg.command == "catalog-list") {
      for (const std::string& name : catalog_names()) log << name << '\n';
      return kExitOk;
    }
    if (cfg.command == "estimate") return run_estimate(cfg, log);
    if (cfg.command == "encode") return run_encode(cfg, log);
    if (cfg.command == "witness") return run_witness(cfg, log);
    if (cfg.command == "probe") return run_probe(cfg, log);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitInvalid;
  } catch (const Error& e) {
    err << "error [" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace nulldist

#include "nulldist/relations.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#include "nulldist/lattice.hpp"
#include "nulldist/report.hpp"

namespace nulldist {

const char* to_string(JPlus j) {
  switch (j) {
    case JPlus::yes: return "yes";
    case JPlus::no: return "no";
    case JPlus::unknown: return "unknown";
  }
  return "?";
}

const char* to_string(JSource s) {
  switch (s) {
    case JSource::oracle: return "oracle";
    case JSource::lattice: return "lattice";
    case JSource::none: return "none";
  }
  return "?";
}

const char* to_string(EncodingFlag f) {
  switch (f) {
    case EncodingFlag::encodes: return "ENCODES";
    case EncodingFlag::violates: return "VIOLATES";
    case EncodingFlag::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::pair<JPlus, JSource> jplus_verdict(const SpacetimeModel& m, const Vec& p, const Vec& q,
                                        const JPlusOptions& opts) {
  if (m.causal_oracle)
    if (auto v = m.causal_oracle(p, q)) return {*v ? JPlus::yes : JPlus::no, JSource::oracle};
  if (!opts.use_lattice) return {JPlus::unknown, JSource::none};
  if (p == q) return {JPlus::yes, JSource::lattice};
  try {
    const double pad = opts.pad ? *opts.pad : chebyshev(p, q) + 1.0;
    LatticeSpec spec;
    spec.region = padded_region(p, q, Vec::Constant(p.size(), pad), opts.delta);
    spec.spacing = opts.delta;
    spec.stencil_radius = opts.stencil;
    spec.node_cap = opts.node_cap;
    const CausalLattice lat = build(m, spec);
    QueryOptions qo;
    qo.exact_endpoints = true;
    if (future_reachable(lat, p, q, qo)) return {JPlus::yes, JSource::lattice};
  } catch (const Error&) {
    // Lattice failures leave the verdict undecided.
  }
  return {JPlus::unknown, JSource::none};
}

std::pair<bool, double> rhat_member(const SpacetimeModel& m, const Vec& p, const Vec& q,
                                    const DistanceEstimate& est, std::optional<double> tol) {
  const double dtau = m.tau(q) - m.tau(p);
  const double gap = est.upper - dtau;
  if (dtau < 0.0) return {false, gap};
  return {gap <= (tol ? *tol : default_rhat_tol(dtau)), gap};
}

RelationVerdict relation_verdict(const SpacetimeModel& m, const Vec& p, const Vec& q,
                                 const EncodingOptions& opts) {
  RelationVerdict v;
  v.p = p;
  v.q = q;
  std::tie(v.j_plus, v.j_source) = jplus_verdict(m, p, q, opts.jplus);

  double upper = std::numeric_limits<double>::infinity();
  if (auto exact = exact_oracle(m, p, q)) {
    upper = *exact;
  } else {
    for (const UpperBoundFn& f : opts.extra_bounds)
      if (auto b = f(p, q)) upper = std::min(upper, *b);
    if (opts.lattice_estimate) {
      try {
        upper = std::min(upper, estimate(m, p, q, opts.estimate).upper);
      } catch (const Error& e) {
        if (e.code() != Errc::Unreachable && e.code() != Errc::TooLarge) throw;
      }
    }
  }
  DistanceEstimate est;
  est.upper = upper;
  v.upper = upper;
  const double dtau = m.tau(q) - m.tau(p);
  v.tol = opts.tol ? *opts.tol : default_rhat_tol(dtau);
  std::tie(v.r_hat, v.r_hat_gap) = rhat_member(m, p, q, est, v.tol);
  return v;
}

EncodingReport encoding_report(const SpacetimeModel& m, const std::vector<std::pair<Vec, Vec>>& pairs,
                               const EncodingOptions& opts) {
  EncodingReport r;
  r.model = m.label;
  bool violates = false, unknown = false;
  for (const auto& [p, q] : pairs) {
    if (!m.in_domain(p) || !m.in_domain(q))
      throw Error(Errc::OutOfDomain, "encoding_report: pair outside domain");
    RelationVerdict v = relation_verdict(m, p, q, opts);
    if (v.r_hat && v.j_plus == JPlus::no) violates = true;
    if (v.r_hat && v.j_plus == JPlus::unknown) unknown = true;
    r.rows.push_back(std::move(v));
  }
  r.flag = violates ? EncodingFlag::violates
           : unknown ? EncodingFlag::inconclusive
                     : EncodingFlag::encodes;
  return r;
}

void write_encoding_csv(std::ostream& os, const SpacetimeModel& m, const EncodingReport& r,
                        bool header) {
  if (header) os << "p,q,tau_p,tau_q,j_plus,j_source,r_hat,gap\n";
  for (const RelationVerdict& v : r.rows)
    os << fmt_point(v.p) << ',' << fmt_point(v.q) << ',' << fmt_real(m.tau(v.p)) << ','
       << fmt_real(m.tau(v.q)) << ',' << to_string(v.j_plus) << ',' << to_string(v.j_source) << ','
       << (v.r_hat ? "true" : "false") << ',' << fmt_real(v.r_hat_gap) << '\n';
}

}  // namespace nulldist

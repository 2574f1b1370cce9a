#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nulldist/relations.hpp"
#include "nulldist/witness.hpp"
#include "support.hpp"

namespace nulldist {
namespace {

using testing::kPi;

Vec P(double t, double x) { return make_point({t, x}); }

TEST(JPlus, OracleVerdicts) {
  auto v = jplus_verdict(catalog("minkowski"), P(0, 0), P(2, 1));
  EXPECT_EQ(v.first, JPlus::yes);
  EXPECT_EQ(v.second, JSource::oracle);
  v = jplus_verdict(catalog("slit_minkowski_cubic"), P(-1, 1), P(1, 1));
  EXPECT_EQ(v.first, JPlus::no);
  EXPECT_EQ(v.second, JSource::oracle);
  v = jplus_verdict(catalog("warped_ads"), make_point({-kPi / 2, 0, 0}), make_point({kPi / 2, 0, 4}));
  EXPECT_EQ(v.first, JPlus::no);
  EXPECT_EQ(v.second, JSource::oracle);
}

// Without an oracle only the lattice may answer, and never with "no".
TEST(JPlus, LatticeFallback) {
  auto m = catalog("minkowski_exp");
  m.causal_oracle = nullptr;
  auto v = jplus_verdict(m, P(0, 0), P(1, 0.5));
  EXPECT_EQ(v.first, JPlus::yes);
  EXPECT_EQ(v.second, JSource::lattice);
  v = jplus_verdict(m, P(0, 0), P(0, 1));
  EXPECT_EQ(v.first, JPlus::unknown);
  EXPECT_EQ(v.second, JSource::none);
  JPlusOptions off;
  off.use_lattice = false;
  EXPECT_EQ(jplus_verdict(m, P(0, 0), P(1, 0.5), off).first, JPlus::unknown);
}

// Slit routing oracle against dense lattice reachability on [-2,2]^2.
TEST(JPlus, SlitOracleMatchesDenseLattice) {
  const auto m = catalog("slit_minkowski_cubic");
  LatticeSpec s;
  s.region = {P(-2, -2), P(2, 2)};
  s.spacing = 0.125;
  s.stencil_radius = 1;
  const auto lat = build(m, s);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> pick(0, lat.node_count() - 1);
  int yes = 0, no = 0;
  for (int i = 0; i < 400; ++i) {
    const Vec a = lat.node(pick(rng)), b = lat.node(pick(rng));
    const bool oracle = *m.causal_oracle(a, b);
    EXPECT_EQ(future_reachable(lat, a, b), oracle) << a.transpose() << " -> " << b.transpose();
    (oracle ? yes : no)++;
  }
  EXPECT_GT(yes, 20);
  EXPECT_GT(no, 20);
}

TEST(RHat, Membership) {
  const auto m = catalog("minkowski");
  DistanceEstimate est;
  est.upper = 2.0;
  auto r = rhat_member(m, P(0, 0), P(2, 1), est);
  EXPECT_TRUE(r.first);
  EXPECT_EQ(r.second, 0.0);
  est.upper = 1.0;
  r = rhat_member(m, P(0, 0), P(0, 1), est);
  EXPECT_FALSE(r.first);
  EXPECT_DOUBLE_EQ(r.second, 1.0);
  est.upper = 2.0;
  EXPECT_FALSE(rhat_member(m, P(2, 1), P(0, 0), est).first);
}

TEST(RHat, SlitCounterexample) {
  const auto m = catalog("slit_minkowski_cubic");
  const auto w = counterexK_witness(1, 1, -1, 1, 1000);
  DistanceEstimate est;
  est.upper = w.null_len;
  const auto r = rhat_member(m, P(-1, 1), P(1, 1), est, 1e-4);
  EXPECT_TRUE(r.first);
  EXPECT_LE(r.second, 2.8e-5);
  // The default tolerance 1e-6 (1 + 2) is tighter than this witness at k = 1000.
  EXPECT_FALSE(rhat_member(m, P(-1, 1), P(1, 1), est).first);
}

TEST(Encoding, MinkowskiRandomPairs) {
  const auto m = catalog("minkowski");
  std::mt19937_64 rng(77);
  const Box box{P(-1, -1), P(1, 1)};
  std::vector<std::pair<Vec, Vec>> pairs;
  for (int i = 0; i < 100; ++i) pairs.emplace_back(testing::uniform_point(rng, box), testing::uniform_point(rng, box));
  const auto rep = encoding_report(m, pairs);
  EXPECT_EQ(rep.flag, EncodingFlag::encodes);
  for (const auto& row : rep.rows) {
    if (row.j_plus == JPlus::yes) EXPECT_TRUE(row.r_hat);
    if (row.r_hat) EXPECT_GE(m.tau(row.q), m.tau(row.p));
  }
}

TEST(Encoding, SlitViolates) {
  const auto m = catalog("slit_minkowski_cubic");
  EncodingOptions o;
  o.lattice_estimate = false;
  o.extra_bounds.push_back([&](const Vec& p, const Vec& q) { return witness_upper_bound(m, p, q); });
  const auto rep = encoding_report(m, {{P(-1, 1), P(1, 1)}}, o);
  EXPECT_EQ(rep.flag, EncodingFlag::violates);
  EXPECT_TRUE(rep.rows[0].r_hat);
  EXPECT_EQ(rep.rows[0].j_plus, JPlus::no);
  std::ostringstream os;
  write_encoding_csv(os, m, rep);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "p,q,tau_p,tau_q,j_plus,j_source,r_hat,gap");
}

TEST(Encoding, InconclusiveWithoutOracle) {
  auto m = catalog("minkowski");
  m.causal_oracle = nullptr;
  EncodingOptions o;
  o.jplus.use_lattice = false;
  o.estimate.levels = 0;
  const auto rep = encoding_report(m, {{P(0, 0), P(1, 0.5)}}, o);
  EXPECT_EQ(rep.flag, EncodingFlag::inconclusive);
}

TEST(Encoding, FlagNames) {
  EXPECT_STREQ(to_string(EncodingFlag::encodes), "ENCODES");
  EXPECT_STREQ(to_string(EncodingFlag::violates), "VIOLATES");
  EXPECT_STREQ(to_string(EncodingFlag::inconclusive), "INCONCLUSIVE");
}

// Local encoding on minkowski_exp: small balls never produce a violation.
TEST(Property, LocalEncodingMinkowskiExp) {
  const auto m = catalog("minkowski_exp");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.07, 0.07);
  std::vector<std::pair<Vec, Vec>> pairs;
  for (int i = 0; i < 60; ++i) {
    const Vec c = testing::uniform_point(rng, Box{P(-1, -1), P(1, 1)});
    pairs.emplace_back(c + P(u(rng), u(rng)), c + P(u(rng), u(rng)));
  }
  EncodingOptions o;
  o.tol = 1e-6;
  const auto rep = encoding_report(m, pairs, o);
  EXPECT_NE(rep.flag, EncodingFlag::violates);
}

// J+ subset of R-hat+, and transitivity of R-hat+ with doubled tolerance.
TEST(Property, InclusionAndTransitivity) {
  const auto m = catalog("minkowski");
  std::mt19937_64 rng(19);
  const Box box{P(-1, -1), P(1, 1)};
  int chains = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec a = testing::uniform_point(rng, box), b = testing::uniform_point(rng, box),
              c = testing::uniform_point(rng, box);
    const auto ab = relation_verdict(m, a, b), bc = relation_verdict(m, b, c);
    for (const auto* v : {&ab, &bc})
      if (v->j_plus == JPlus::yes) EXPECT_TRUE(v->r_hat);
    if (ab.r_hat && bc.r_hat) {
      ++chains;
      EncodingOptions o;
      o.tol = 2.0 * std::max(ab.tol, bc.tol);
      EXPECT_TRUE(relation_verdict(m, a, c, o).r_hat);
    }
  }
  EXPECT_GT(chains, 20);
}

}  // namespace
}  // namespace nulldist

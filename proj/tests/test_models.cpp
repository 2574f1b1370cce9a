#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nulldist/models.hpp"
#include "support.hpp"

namespace nulldist {
namespace {

using testing::kPi;

TEST(Classify, MinkowskiExamples) {
  const auto m = catalog("minkowski");
  const Vec o = make_point({0.0, 0.0});
  auto c = classify_vector(m, o, make_point({1.0, 0.0}));
  EXPECT_EQ(c.causal_type, CausalType::timelike);
  EXPECT_EQ(c.orientation, Orientation::future);
  c = classify_vector(m, o, make_point({1.0, 1.0}));
  EXPECT_EQ(c.causal_type, CausalType::null);
  EXPECT_EQ(c.orientation, Orientation::future);
  c = classify_vector(m, o, make_point({-2.0, 1.0}));
  EXPECT_EQ(c.causal_type, CausalType::timelike);
  EXPECT_EQ(c.orientation, Orientation::past);
  c = classify_vector(m, o, make_point({0.5, 1.0}));
  EXPECT_EQ(c.causal_type, CausalType::spacelike);
  EXPECT_EQ(c.orientation, Orientation::none);
}

TEST(Classify, WarpedSpatialDirection) {
  const auto m = catalog("warped_ads");
  const auto c = classify_vector(m, make_point({0.0, 2.0, 0.0}), make_point({0.0, 0.0, 1.0}));
  EXPECT_EQ(c.causal_type, CausalType::spacelike);
  EXPECT_EQ(c.orientation, Orientation::none);
}

TEST(Classify, ZeroVectorRejected) {
  const auto m = catalog("minkowski");
  try {
    classify_vector(m, make_point({0.0, 0.0}), make_point({0.0, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZeroVector);
  }
}

TEST(Lapse, Examples) {
  EXPECT_DOUBLE_EQ(lapse_alpha(catalog("minkowski"), make_point({0.3, -2.0})), 1.0);
  const auto e = catalog("minkowski_exp");
  for (double t : {-1.0, 0.0, 0.7})
    EXPECT_NEAR(lapse_alpha(e, make_point({t, 0.0})), std::exp(-2.0 * t), 1e-12 * std::exp(-2.0 * t));
  // dtau = (3 + 1, -2), inverse Minkowski: -16 + 4 = -12.
  EXPECT_NEAR(lapse_alpha(catalog("slit_minkowski_cubic"), make_point({1.0, -1.0})), 1.0 / 12.0, 1e-15);
}

TEST(WickNorm, Examples) {
  const auto m = catalog("minkowski");
  const Vec o = make_point({0.0, 0.0});
  for (auto [a, b] : {std::pair{0.3, 0.4}, {-1.0, 2.0}, {1.0, 1.0}})
    EXPECT_NEAR(wick_norm_sq(m, o, make_point({a, b})), a * a + b * b, 1e-14);
  EXPECT_NEAR(wick_norm_sq(m, o, make_point({1.0, 1.0})), 2.0, 1e-14);
  const auto w = catalog("warped_ads");
  EXPECT_NEAR(wick_norm_sq(w, make_point({0.0, 0.0, 0.0}), make_point({1.0, 0.0, 0.0})), 1.0, 1e-14);
}

TEST(WickNorm, PositiveAndConformallyInvariant) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (const auto& name : catalog_names()) {
    const auto m = catalog(name);
    const auto m4 = conformal_rescale(m, 4.0);
    const Box box = testing::sample_box(m);
    for (int i = 0; i < 200; ++i) {
      const Vec x = testing::uniform_point(rng, box);
      if (!m.in_domain(x)) continue;
      Vec v(m.dim);
      for (int k = 0; k < m.dim; ++k) v[k] = g(rng);
      const double w = wick_norm_sq(m, x, v);
      EXPECT_GT(w, 0.0) << name;
      EXPECT_NEAR(wick_norm_sq(m4, x, v), w, 1e-12 * w) << name;
    }
  }
}

TEST(Catalog, NamesRoundTrip) {
  for (const auto& name : catalog_names()) EXPECT_EQ(catalog(name).label, name);
}

TEST(Catalog, UnknownModel) {
  try {
    catalog("schwarzschild");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownModel);
  }
}

TEST(Catalog, WarpedTauAtPastEndpoint) {
  const auto m = catalog("warped_ads");
  const double expect = -kPi / 2 - kPi * kPi * kPi / 8;
  EXPECT_NEAR(m.tau(make_point({-kPi / 2, 0.0, 0.0})), expect, 1e-14);
  EXPECT_NEAR(expect, -5.4466, 1e-4);
}

TEST(Catalog, SlitDomain) {
  const auto m = catalog("slit_minkowski_cubic");
  EXPECT_FALSE(m.in_domain(make_point({0.0, 1.0})));
  EXPECT_FALSE(m.in_domain(make_point({0.0, 0.0})));
  EXPECT_TRUE(m.in_domain(make_point({0.0, -1.0})));
  EXPECT_TRUE(m.in_domain(make_point({1e-9, 1.0})));
}

TEST(Catalog, SignatureAcrossSampleBoxes) {
  std::mt19937_64 rng(5);
  for (const auto& name : catalog_names()) {
    const auto m = catalog(name);
    const Box box = testing::sample_box(m);
    for (int i = 0; i < 100; ++i) {
      const Vec x = testing::uniform_point(rng, box);
      if (m.in_domain(x)) EXPECT_TRUE(lorentzian_signature(m.metric(x))) << name;
    }
  }
}

// Analytic gradients agree with central differences of tau.
TEST(Catalog, GradientMatchesTau) {
  std::mt19937_64 rng(7);
  for (const auto& name : catalog_names()) {
    const auto m = catalog(name);
    const Box box = testing::sample_box(m);
    for (int i = 0; i < 50; ++i) {
      const Vec x = testing::uniform_point(rng, box);
      if (!m.in_domain(x)) continue;
      const Vec d = m.dtau_at(x);
      for (int k = 0; k < m.dim; ++k) {
        Vec a = x, b = x;
        a[k] -= 1e-6;
        b[k] += 1e-6;
        if (!m.in_domain(a) || !m.in_domain(b)) continue;
        EXPECT_NEAR(d[k], (m.tau(b) - m.tau(a)) / 2e-6, 1e-5 * (1.0 + std::abs(d[k]))) << name;
      }
    }
  }
}

TEST(Catalog, MinkowskiDimensionParameter) {
  EXPECT_EQ(catalog("minkowski", {{"n", 3}}).dim, 4);
  EXPECT_THROW(catalog("minkowski", {{"n", 0}}), Error);
  EXPECT_THROW(catalog("minkowski", {{"n", 1.5}}), Error);
  EXPECT_THROW(catalog("warped_ads", {{"n", 2}}), Error);
}

TEST(Gudermannian, Values) {
  EXPECT_DOUBLE_EQ(gudermannian(0.0), 0.0);
  EXPECT_NEAR(gudermannian(40.0), kPi / 2, 1e-15);
  for (double x : {-3.0, -0.5, 0.2, 2.5}) EXPECT_NEAR(gudermannian(x), std::atan(std::sinh(x)), 1e-14);
}

TEST(TimeFunction, DifferentialIsPastTimelike) {
  std::mt19937_64 rng(3);
  for (const auto& name : catalog_names()) {
    const auto m = catalog(name);
    const Box box = testing::sample_box(m);
    for (int i = 0; i < 100; ++i) {
      const Vec x = testing::uniform_point(rng, box);
      if (m.in_domain(x)) EXPECT_GT(lapse_alpha(m, x), 0.0) << name;
    }
  }
}

}  // namespace
}  // namespace nulldist

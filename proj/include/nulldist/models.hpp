#pragma once

#include <Eigen/Core>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nulldist/errors.hpp"

namespace nulldist {

// Chart dimension is small; fixed-capacity storage keeps evaluations off the heap.
inline constexpr int kMaxDim = 6;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using ChartPoint = Vec;

inline constexpr double kTolNull = 1e-12;

enum class CausalType { timelike, null, spacelike };
enum class Orientation { future, past, none };

const char* to_string(CausalType c);
const char* to_string(Orientation o);

struct VectorClass {
  CausalType causal_type;
  Orientation orientation;
};

using Params = std::map<std::string, double>;

struct SpacetimeModel {
  int dim = 2;
  std::string label;
  Params params;

  std::function<bool(const Vec&)> domain;
  std::function<Mat(const Vec&)> metric;
  std::function<double(const Vec&)> tau;
  std::function<Vec(const Vec&)> dtau;  // empty: central differences

  // Exact J+ predicate; nullopt where the oracle does not decide.
  std::function<std::optional<bool>(const Vec&, const Vec&)> causal_oracle;
  std::function<std::optional<double>(const Vec&, const Vec&)> nulldist_oracle;
  // Analytic test for straight segments meeting an excluded set.
  std::function<bool(const Vec&, const Vec&)> segment_blocked;

  bool temporal = true;
  bool constant_metric = false;
  bool lipschitz_tau = true;

  bool in_domain(const Vec& x) const;
  Vec dtau_at(const Vec& x) const;
  double tau_at(const Vec& x) const { return tau(x); }
};

struct AuxiliaryMetric {
  std::function<Mat(const Vec&)> evaluator;
  std::string label;
  bool constant = false;
};

AuxiliaryMetric euclidean_metric(int dim, double scale = 1.0);

Vec make_point(std::initializer_list<double> xs);

double finite_difference_step(const Vec& x);

VectorClass classify_vector(const SpacetimeModel& m, const Vec& x, const Vec& v);
double lapse_alpha(const SpacetimeModel& m, const Vec& x);
double wick_norm_sq(const SpacetimeModel& m, const Vec& x, const Vec& v);

// One negative and dim-1 positive eigenvalues.
bool lorentzian_signature(const Mat& g);

SpacetimeModel catalog(const std::string& name, const Params& params = {});
const std::vector<std::string>& catalog_names();

// Metric multiplied by a positive constant; tau and oracles kept.
SpacetimeModel conformal_rescale(const SpacetimeModel& m, double factor);

// Same metric and oracles of J+, different time function.
SpacetimeModel with_time_function(const SpacetimeModel& m, std::string label,
                                  std::function<double(const Vec&)> tau,
                                  std::function<Vec(const Vec&)> dtau);

// 2 arctan(tanh(x/2)), the conformal coordinate of the warped model.
double gudermannian(double x);

}  // namespace nulldist

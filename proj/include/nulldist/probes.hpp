#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nulldist/lattice.hpp"
#include "nulldist/models.hpp"
#include "nulldist/paths.hpp"

namespace nulldist {

inline constexpr std::uint64_t kDefaultSeed = 0x4E554C4C44;  // "NULLD"

enum class EscapeVerdict { incomplete_witness, none };
const char* to_string(EscapeVerdict v);

struct EscapeWitness {
  std::string ray;  // base, direction and parametrization
  std::vector<Vec> points;
  std::vector<double> increments;  // bound on d(x_i, x_{i+1})
  double tail_sum = 0.0;
  double horizon = 0.0;
  bool escaped = false;
  EscapeVerdict verdict = EscapeVerdict::none;
};

// gamma(s) = base + s * direction, s = 0, 1, ..., floor(S); every unit step is
// verified causal. Increments are |delta tau|; the tail sums the last half.
EscapeWitness escape_probe(const SpacetimeModel& m, const Vec& base, const Vec& direction,
                           double horizon, double eps);

using PairBound = std::function<double(const Vec&, const Vec&)>;

// Sequence mode: increments are bound(x_i, x_{i+1}).
EscapeWitness escape_sequence(const std::vector<Vec>& points, const PairBound& bound, double eps,
                              std::string description = "sequence");

// Zigzag from a to b (same t) in slice_incomplete_warp with `segments` teeth
// per unit of x; returns the verified path. Its null length bounds d(a, b).
PiecewisePath slice_bounce_path(const SpacetimeModel& m, const Vec& a, const Vec& b,
                                int segments_per_unit = 64);

struct ScanOptions {
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  // Pairs without an oracle verdict are checked on a lattice of this spacing.
  double lattice_delta = 0.25;
};

struct PairSample {
  Vec p, q;
  double value;  // ratio or slack
};

struct AntiLipschitzResult {
  double inf_ratio = 0.0;
  Vec argmin_p, argmin_q;
  std::vector<PairSample> samples;
};

// Ratio (tau(q) - tau(p)) / L_h(chord) over causal pairs, orientated so the
// numerator is >= 0. The chord realizes d_h when h is constant. Null pairs
// along the coordinate null directions are always included.
AntiLipschitzResult anti_lipschitz_scan(const SpacetimeModel& m, const AuxiliaryMetric& h,
                                        const Box& region, int n_pairs, const ScanOptions& opts = {});

struct SteepnessResult {
  double min_slack = 0.0;
  Vec argmin_point, argmin_vector;
  std::vector<PairSample> samples;  // p = point, q = vector
};

// min over sampled future causal v (v_t = 1) of dtau(v) - |v|_h.
SteepnessResult steepness_scan(const SpacetimeModel& m, const AuxiliaryMetric& h, const Box& region,
                               int n_samples, const ScanOptions& opts = {});

struct BiLipschitzResult {
  double min_ratio = 0.0, max_ratio = 0.0;
  Vec argmin_p, argmin_q, argmax_p, argmax_q;
  std::vector<PairSample> samples;
};

// |delta tau_2| / |delta tau_1| over causal pairs of m1 (both models share the metric).
BiLipschitzResult bilipschitz_scan(const SpacetimeModel& m1, const SpacetimeModel& m2,
                                   const Box& region, int n_pairs, const ScanOptions& opts = {});
BiLipschitzResult bilipschitz_pairs(const SpacetimeModel& m1, const SpacetimeModel& m2,
                                    const std::vector<std::pair<Vec, Vec>>& pairs);

// Per-sample rows then a key=value footer.
void write_escape_csv(std::ostream& os, const EscapeWitness& w);
void write_samples_csv(std::ostream& os, const std::vector<PairSample>& s, const std::string& value_name);

}  // namespace nulldist

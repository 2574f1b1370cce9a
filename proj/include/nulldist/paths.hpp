#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nulldist/models.hpp"

namespace nulldist {

struct PiecewisePath {
  std::vector<Vec> breakpoints;
  std::vector<Orientation> orientations;  // one per segment
  std::string model_label;

  std::size_t segments() const { return orientations.size(); }
  PiecewisePath reversed() const;
};

// Joins two paths sharing the end/start breakpoint.
PiecewisePath concat(const PiecewisePath& a, const PiecewisePath& b);

enum class CausalStatus { verified, violated, boundary_crossing };
const char* to_string(CausalStatus s);

struct CausalVerdict {
  CausalStatus status = CausalStatus::verified;
  // Largest g(v,v) / (alpha * |v|_W^2) seen, i.e. g(v,v) measured in the
  // lapse-normalized Wick norm; conformally invariant.
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> failing_segment;
  Orientation orientation = Orientation::none;
};

inline constexpr int kDefaultSamples = 33;

// 0 for constant-coefficient metrics, a strict timelike bias otherwise.
double default_margin(const SpacetimeModel& m);

CausalVerdict segment_causal(const SpacetimeModel& m, const Vec& a, const Vec& b,
                             int n_samples = kDefaultSamples);
CausalVerdict segment_causal(const SpacetimeModel& m, const Vec& a, const Vec& b,
                             int n_samples, double margin);

// Checks every segment against its declared orientation.
CausalVerdict verify_causal(const SpacetimeModel& m, const PiecewisePath& path,
                            int n_samples = kDefaultSamples);

// Orientations read off from verification; throws NotCausal on failure.
PiecewisePath make_path(const SpacetimeModel& m, std::vector<Vec> points,
                        int n_samples = kDefaultSamples);

double null_length(const SpacetimeModel& m, const PiecewisePath& path);
// Sum of |delta tau| without re-verifying; for paths already certified.
double null_length_unchecked(const SpacetimeModel& m, const PiecewisePath& path);

double wick_length(const SpacetimeModel& m, const PiecewisePath& path, int quad_points = 16);
double wick_segment_length(const SpacetimeModel& m, const Vec& a, const Vec& b,
                           int quad_points = 16);

// segment, orientation, coordinates; one row per breakpoint.
void write_path_csv(std::ostream& os, const PiecewisePath& path);

}  // namespace nulldist

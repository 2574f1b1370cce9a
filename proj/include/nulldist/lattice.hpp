#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "nulldist/models.hpp"
#include "nulldist/paths.hpp"

namespace nulldist {

struct Box {
  Vec lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
};

struct LatticeSpec {
  Box region;
  double spacing = 1.0;
  int stencil_radius = 2;
  std::size_t node_cap = 5'000'000;
  int n_samples = kDefaultSamples;
  int threads = 1;
};

// Adjacency entry; `future` means the step from the owning node to `to` is
// future-directed.
struct Adjacent {
  std::int32_t to;
  double weight;
  bool future;
};

class CausalLattice {
 public:
  const LatticeSpec& spec() const { return spec_; }
  const SpacetimeModel& model() const { return *model_; }
  const std::string& model_label() const { return model_->label; }

  std::size_t node_count() const { return node_grid_.size(); }
  std::size_t edge_count() const { return adj_.size() / 2; }
  Vec node(std::size_t id) const;
  double tau(std::size_t id) const { return tau_[id]; }
  std::span<const Adjacent> neighbors(std::size_t id) const {
    return {adj_.data() + start_[id], adj_.data() + start_[id + 1]};
  }
  // Node exactly at grid index `idx`, if inside the box and the domain.
  std::optional<std::int32_t> node_at(std::span<const long> idx) const;
  const std::vector<long>& shape() const { return shape_; }
  const std::vector<std::vector<long>>& half_stencil() const { return stencil_; }

 private:
  friend CausalLattice build(const SpacetimeModel&, const LatticeSpec&);
  std::shared_ptr<const SpacetimeModel> model_;
  LatticeSpec spec_;
  std::vector<long> shape_;
  std::vector<std::int32_t> grid_node_;
  std::vector<std::int64_t> node_grid_;
  std::vector<double> tau_;
  std::vector<std::size_t> start_;
  std::vector<Adjacent> adj_;
  std::vector<std::vector<long>> stencil_;
};

// Offsets with Chebyshev norm <= r, primitive, first nonzero entry positive.
std::vector<std::vector<long>> half_stencil(int dim, int r);

CausalLattice build(const SpacetimeModel& model, const LatticeSpec& spec);

struct QueryOptions {
  // Insert off-grid query points as extra nodes instead of snapping.
  bool exact_endpoints = false;
};

struct ShortestPath {
  double value = 0.0;
  PiecewisePath path;
  double snap_error = 0.0;  // Chebyshev distance moved by snapping
};

ShortestPath null_shortest_path(const CausalLattice& lat, const Vec& p, const Vec& q,
                                const QueryOptions& opts = {});
double wick_shortest_path(const CausalLattice& lat, const Vec& p, const Vec& q,
                          const QueryOptions& opts = {});
bool future_reachable(const CausalLattice& lat, const Vec& p, const Vec& q,
                      const QueryOptions& opts = {});

// node_id,node_id,weight,orientation for each undirected edge (lower id first).
void write_adjacency_csv(std::ostream& os, const CausalLattice& lat);
void write_nodes_csv(std::ostream& os, const CausalLattice& lat);

}  // namespace nulldist

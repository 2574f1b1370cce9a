#include "nulldist/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <thread>
#include <unordered_map>

#include "nulldist/report.hpp"

namespace nulldist {

namespace {

struct Edge {
  std::int32_t a, b;
  double w;
  bool future;  // a -> b
};

long gcd_all(const std::vector<long>& o) {
  long g = 0;
  for (long x : o) g = std::gcd(g, std::labs(x));
  return g;
}

// Grid index of the nearest grid point (may lie outside the box).
std::vector<long> nearest_index(const LatticeSpec& s, const Vec& p) {
  std::vector<long> idx(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    idx[i] = std::lround((p[i] - s.region.lo[i]) / s.spacing);
  return idx;
}

constexpr std::int32_t kNone = -1;

struct Endpoint {
  Vec point;
  std::int32_t node = kNone;  // grid node, or kNone when virtual
  std::vector<Adjacent> links;  // for virtual endpoints; to = grid node id
  double snap_error = 0.0;
};

Endpoint resolve(const CausalLattice& lat, const Vec& p, bool exact) {
  const SpacetimeModel& m = lat.model();
  const LatticeSpec& s = lat.spec();
  if (p.size() != m.dim) throw Error(Errc::BadParams, "query point has wrong dimension");
  if (!m.in_domain(p)) throw Error(Errc::OutOfDomain, "query point outside domain");
  Endpoint e;
  e.point = p;
  const std::vector<long> idx = nearest_index(s, p);
  const auto hit = lat.node_at(idx);
  double dist = std::numeric_limits<double>::infinity();
  if (hit) dist = (lat.node(*hit) - p).cwiseAbs().maxCoeff();
  const double exact_tol = 1e-12 * (1.0 + p.cwiseAbs().maxCoeff());
  if (hit && dist <= exact_tol) {
    e.node = *hit;
    e.snap_error = dist;
    return e;
  }
  if (!exact) {
    if (!hit || dist > 0.5 * s.spacing * (1.0 + 1e-12))
      throw Error(Errc::SnapFailed, "no lattice node within delta/2 of query point");
    e.node = *hit;
    e.snap_error = dist;
    return e;
  }
  // Virtual node wired to verified-causal neighbours within r * delta.
  const int r = s.stencil_radius;
  const double reach = r * s.spacing * (1.0 + 1e-12);
  const int dim = m.dim;
  std::vector<long> lo(dim), hi(dim), cur(dim);
  for (int i = 0; i < dim; ++i) {
    const double f = (p[i] - s.region.lo[i]) / s.spacing;
    lo[i] = std::max(0L, static_cast<long>(std::floor(f)) - r);
    hi[i] = std::min(lat.shape()[i] - 1, static_cast<long>(std::ceil(f)) + r);
    if (lo[i] > hi[i]) return e;
  }
  cur = lo;
  const double tp = m.tau(p);
  while (true) {
    if (auto id = lat.node_at(cur)) {
      const Vec x = lat.node(*id);
      if ((x - p).cwiseAbs().maxCoeff() <= reach && x != p) {
        const CausalVerdict v = segment_causal(m, p, x, s.n_samples);
        if (v.status == CausalStatus::verified) {
          const double w = std::abs(lat.tau(*id) - tp);
          if (w > 0) e.links.push_back({*id, w, v.orientation == Orientation::future});
        }
      }
    }
    int k = dim - 1;
    while (k >= 0 && cur[k] == hi[k]) {
      cur[k] = lo[k];
      --k;
    }
    if (k < 0) break;
    ++cur[k];
  }
  return e;
}

// Implicit graph: lattice nodes plus up to two virtual endpoints.
struct QueryGraph {
  const CausalLattice& lat;
  Endpoint src, dst;
  std::int32_t n;
  std::int32_t src_id, dst_id;
  std::unordered_map<std::int32_t, Adjacent> into_dst;  // node -> dst
  std::optional<Adjacent> direct;                        // src -> dst when both virtual

  QueryGraph(const CausalLattice& l, Endpoint a, Endpoint b)
      : lat(l), src(std::move(a)), dst(std::move(b)) {
    n = static_cast<std::int32_t>(lat.node_count());
    src_id = src.node != kNone ? src.node : n;
    dst_id = dst.node != kNone ? dst.node : n + 1;
    if (dst.node == kNone)
      for (const Adjacent& e : dst.links) into_dst[e.to] = {dst_id, e.weight, !e.future};
    if (src.node == kNone && dst.node == kNone) {
      const SpacetimeModel& m = lat.model();
      const double reach = lat.spec().stencil_radius * lat.spec().spacing * (1.0 + 1e-12);
      if ((dst.point - src.point).cwiseAbs().maxCoeff() <= reach && dst.point != src.point) {
        const CausalVerdict v = segment_causal(m, src.point, dst.point, lat.spec().n_samples);
        const double w = std::abs(m.tau(dst.point) - m.tau(src.point));
        if (v.status == CausalStatus::verified && w > 0)
          direct = Adjacent{dst_id, w, v.orientation == Orientation::future};
      }
    }
  }

  std::int32_t size() const { return n + 2; }

  Vec point(std::int32_t id) const {
    if (id == n) return src.point;
    if (id == n + 1) return dst.point;
    return lat.node(static_cast<std::size_t>(id));
  }

  template <class F>
  void for_each(std::int32_t u, F&& f) const {
    if (u == n) {
      for (const Adjacent& e : src.links) f(e);
      if (direct) f(*direct);
      return;
    }
    if (u == n + 1) return;
    for (const Adjacent& e : lat.neighbors(static_cast<std::size_t>(u))) f(e);
    if (!into_dst.empty()) {
      auto it = into_dst.find(u);
      if (it != into_dst.end()) f(it->second);
    }
  }
};

struct DijkstraResult {
  double value;
  std::vector<std::int32_t> nodes;
  std::vector<bool> future;
};

template <class Weight>
DijkstraResult dijkstra(const QueryGraph& g, Weight&& weight) {
  const std::int32_t N = g.size();
  std::vector<double> dist(N, std::numeric_limits<double>::infinity());
  std::vector<std::int32_t> prev(N, kNone);
  std::vector<char> prev_future(N, 0), done(N, 0);
  using Item = std::pair<double, std::int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[g.src_id] = 0.0;
  pq.push({0.0, g.src_id});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == g.dst_id) break;
    g.for_each(u, [&](const Adjacent& e) {
      if (done[e.to]) return;
      const double nd = d + weight(u, e);
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        prev[e.to] = u;
        prev_future[e.to] = e.future;
        pq.push({nd, e.to});
      }
    });
  }
  if (!done[g.dst_id]) throw Error(Errc::Unreachable, "no causal lattice path between points");
  DijkstraResult r;
  r.value = dist[g.dst_id];
  for (std::int32_t v = g.dst_id; v != g.src_id; v = prev[v]) {
    r.nodes.push_back(v);
    r.future.push_back(prev_future[v]);
  }
  r.nodes.push_back(g.src_id);
  std::reverse(r.nodes.begin(), r.nodes.end());
  std::reverse(r.future.begin(), r.future.end());
  return r;
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

PiecewisePath to_path(const QueryGraph& g, const DijkstraResult& r) {
  PiecewisePath path;
  path.model_label = g.lat.model_label();
  for (std::int32_t id : r.nodes) path.breakpoints.push_back(g.point(id));
  for (bool f : r.future) path.orientations.push_back(f ? Orientation::future : Orientation::past);
  return path;
}

}  // namespace

Vec CausalLattice::node(std::size_t id) const {
  const int dim = model_->dim;
  Vec x(dim);
  std::int64_t gid = node_grid_[id];
  for (int i = dim - 1; i >= 0; --i) {
    const long k = static_cast<long>(gid % shape_[i]);
    gid /= shape_[i];
    x[i] = spec_.region.lo[i] + static_cast<double>(k) * spec_.spacing;
  }
  return x;
}

std::optional<std::int32_t> CausalLattice::node_at(std::span<const long> idx) const {
  std::int64_t gid = 0;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= shape_[i]) return std::nullopt;
    gid = gid * shape_[i] + idx[i];
  }
  const std::int32_t id = grid_node_[static_cast<std::size_t>(gid)];
  if (id == kNone) return std::nullopt;
  return id;
}

std::vector<std::vector<long>> half_stencil(int dim, int r) {
  std::vector<std::vector<long>> out;
  std::vector<long> o(dim, -r);
  while (true) {
    long first = 0;
    for (long x : o)
      if (x != 0) {
        first = x;
        break;
      }
    if (first > 0 && gcd_all(o) == 1) out.push_back(o);
    int k = dim - 1;
    while (k >= 0 && o[k] == r) o[k--] = -r;
    if (k < 0) break;
    ++o[k];
  }
  return out;
}

CausalLattice build(const SpacetimeModel& model, const LatticeSpec& spec) {
  const int dim = model.dim;
  if (spec.region.lo.size() != dim || spec.region.hi.size() != dim)
    throw Error(Errc::BadParams, "lattice region has wrong dimension");
  if (!(spec.spacing > 0.0)) throw Error(Errc::BadParams, "lattice spacing must be positive");
  if (spec.stencil_radius < 1 || spec.stencil_radius > 4)
    throw Error(Errc::BadParams, "stencil radius must be in [1,4]");

  CausalLattice lat;
  lat.model_ = std::make_shared<const SpacetimeModel>(model);
  lat.spec_ = spec;
  lat.shape_.resize(dim);
  double total = 1.0;
  for (int i = 0; i < dim; ++i) {
    const double cells = (spec.region.hi[i] - spec.region.lo[i]) / spec.spacing;
    const double k = std::round(cells);
    if (!(k >= 0.0) || std::abs(cells - k) > 1e-9 * std::max(1.0, k))
      throw Error(Errc::BadParams, "box edge is not an integer multiple of the spacing");
    lat.shape_[i] = static_cast<long>(k) + 1;
    total *= static_cast<double>(lat.shape_[i]);
  }
  if (total > static_cast<double>(spec.node_cap))
    throw Error(Errc::TooLarge, "lattice would have " + fmt_real(total) + " grid points");

  const auto n_grid = static_cast<std::size_t>(total);
  lat.grid_node_.assign(n_grid, kNone);
  {
    Vec x(dim);
    std::vector<long> idx(dim, 0);
    for (std::size_t gid = 0; gid < n_grid; ++gid) {
      for (int i = 0; i < dim; ++i) x[i] = spec.region.lo[i] + static_cast<double>(idx[i]) * spec.spacing;
      if (model.in_domain(x)) {
        lat.grid_node_[gid] = static_cast<std::int32_t>(lat.node_grid_.size());
        lat.node_grid_.push_back(static_cast<std::int64_t>(gid));
      }
      for (int k = dim - 1; k >= 0; --k) {
        if (++idx[k] < lat.shape_[k]) break;
        idx[k] = 0;
      }
    }
  }
  const std::size_t n = lat.node_grid_.size();
  if (n == 0) throw Error(Errc::EmptyRegion, "region does not meet the domain");
  lat.tau_.resize(n);
  for (std::size_t i = 0; i < n; ++i) lat.tau_[i] = model.tau(lat.node(i));
  lat.stencil_ = half_stencil(dim, spec.stencil_radius);

  const double margin = default_margin(model);
  const int threads = std::max(1, spec.threads);
  std::vector<std::vector<Edge>> parts(threads);
  auto work = [&](int t) {
    const std::size_t begin = n * t / threads, end = n * (t + 1) / threads;
    std::vector<long> idx(dim), nb(dim);
    for (std::size_t a = begin; a < end; ++a) {
      std::int64_t gid = lat.node_grid_[a];
      for (int i = dim - 1; i >= 0; --i) {
        idx[i] = static_cast<long>(gid % lat.shape_[i]);
        gid /= lat.shape_[i];
      }
      const Vec xa = lat.node(a);
      for (const auto& o : lat.stencil_) {
        for (int i = 0; i < dim; ++i) nb[i] = idx[i] + o[i];
        const auto b = lat.node_at(nb);
        if (!b) continue;
        const Vec xb = lat.node(*b);
        const CausalVerdict v = segment_causal(model, xa, xb, spec.n_samples, margin);
        if (v.status != CausalStatus::verified) continue;
        const double w = std::abs(lat.tau_[*b] - lat.tau_[a]);
        if (!(w > 0.0)) continue;  // unreachable for a time function
        parts[t].push_back({static_cast<std::int32_t>(a), *b, w, v.orientation == Orientation::future});
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  lat.start_.assign(n + 1, 0);
  for (const auto& part : parts)
    for (const Edge& e : part) {
      ++lat.start_[e.a + 1];
      ++lat.start_[e.b + 1];
    }
  for (std::size_t i = 0; i < n; ++i) lat.start_[i + 1] += lat.start_[i];
  lat.adj_.resize(lat.start_[n]);
  std::vector<std::size_t> fill(lat.start_.begin(), lat.start_.end() - 1);
  for (const auto& part : parts)
    for (const Edge& e : part) {
      lat.adj_[fill[e.a]++] = {e.b, e.w, e.future};
      lat.adj_[fill[e.b]++] = {e.a, e.w, !e.future};
    }
  return lat;
}

ShortestPath null_shortest_path(const CausalLattice& lat, const Vec& p, const Vec& q,
                                const QueryOptions& opts) {
  ShortestPath out;
  if (p == q) {
    out.path.model_label = lat.model_label();
    out.path.breakpoints = {p};
    return out;
  }
  // Always search from the lexicographically smaller point so d(p,q) and
  // d(q,p) are computed identically.
  const bool swap = lex_less(q, p);
  Endpoint a = resolve(lat, swap ? q : p, opts.exact_endpoints);
  Endpoint b = resolve(lat, swap ? p : q, opts.exact_endpoints);
  out.snap_error = std::max(a.snap_error, b.snap_error);
  if (a.node != kNone && a.node == b.node) {
    out.path.model_label = lat.model_label();
    out.path.breakpoints = {lat.node(a.node)};
    return out;
  }
  QueryGraph g(lat, std::move(a), std::move(b));
  const DijkstraResult r = dijkstra(g, [](std::int32_t, const Adjacent& e) { return e.weight; });
  out.value = r.value;
  out.path = to_path(g, r);
  if (swap) out.path = out.path.reversed();
  return out;
}

double wick_shortest_path(const CausalLattice& lat, const Vec& p, const Vec& q,
                          const QueryOptions& opts) {
  if (p == q) return 0.0;
  const bool swap = lex_less(q, p);
  Endpoint a = resolve(lat, swap ? q : p, opts.exact_endpoints);
  Endpoint b = resolve(lat, swap ? p : q, opts.exact_endpoints);
  if (a.node != kNone && a.node == b.node) return 0.0;
  QueryGraph g(lat, std::move(a), std::move(b));
  const SpacetimeModel& m = lat.model();
  const DijkstraResult r = dijkstra(g, [&](std::int32_t u, const Adjacent& e) {
    return wick_segment_length(m, g.point(u), g.point(e.to));
  });
  return r.value;
}

bool future_reachable(const CausalLattice& lat, const Vec& p, const Vec& q,
                      const QueryOptions& opts) {
  if (p == q) return true;
  QueryGraph g(lat, resolve(lat, p, opts.exact_endpoints), resolve(lat, q, opts.exact_endpoints));
  if (g.src_id == g.dst_id) return true;
  std::vector<char> seen(g.size(), 0);
  std::queue<std::int32_t> bfs;
  bfs.push(g.src_id);
  seen[g.src_id] = 1;
  while (!bfs.empty()) {
    const std::int32_t u = bfs.front();
    bfs.pop();
    if (u == g.dst_id) return true;
    g.for_each(u, [&](const Adjacent& e) {
      if (e.future && !seen[e.to]) {
        seen[e.to] = 1;
        bfs.push(e.to);
      }
    });
  }
  return false;
}

void write_adjacency_csv(std::ostream& os, const CausalLattice& lat) {
  os << "node_id,node_id,weight,orientation\n";
  for (std::size_t a = 0; a < lat.node_count(); ++a)
    for (const Adjacent& e : lat.neighbors(a))
      if (static_cast<std::size_t>(e.to) > a)
        os << a << ',' << e.to << ',' << fmt_real(e.weight) << ',' << (e.future ? "future" : "past")
           << '\n';
}

void write_nodes_csv(std::ostream& os, const CausalLattice& lat) {
  os << "node_id";
  for (int i = 0; i < lat.model().dim; ++i) os << ",x" << i;
  os << '\n';
  for (std::size_t a = 0; a < lat.node_count(); ++a) {
    os << a;
    const Vec x = lat.node(a);
    for (Eigen::Index i = 0; i < x.size(); ++i) os << ',' << fmt_real(x[i]);
    os << '\n';
  }
}

}  // namespace nulldist

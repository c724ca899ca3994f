#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spfar/length.hpp"

namespace spfar {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotSimple : public BuildError {
 public:
  using BuildError::BuildError;
};
class NotConnected : public BuildError {
 public:
  using BuildError::BuildError;
};
class NonPositiveWeight : public BuildError {
 public:
  using BuildError::BuildError;
};

class InvalidQuery : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  VertexId u;
  VertexId v;
  Length w;

  VertexId other(VertexId x) const { return x == u ? v : u; }
};

/// Weighted, simple, connected, undirected graph with exact integer weights.
/// Immutable after build; all queries are read-only.
class Network {
 public:
  Network(VertexId n, std::vector<Edge> edges)
      : n_(n), edges_(std::move(edges)) {
    validate();
    adj_.resize(n_);
    for (EdgeId e = 0; e < static_cast<EdgeId>(edges_.size()); ++e) {
      adj_[edges_[e].u].push_back(e);
      adj_[edges_[e].v].push_back(e);
    }
    check_connected();
  }

  VertexId vertex_count() const { return n_; }
  EdgeId edge_count() const { return static_cast<EdgeId>(edges_.size()); }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<EdgeId>& incident(VertexId v) const { return adj_[v]; }

  /// Lowest-index edge incident to v; anchor for canonical vertex points.
  EdgeId canonical_edge(VertexId v) const {
    return *std::min_element(adj_[v].begin(), adj_[v].end());
  }

  Length total_weight() const {
    Length t = 0;
    for (const Edge& e : edges_) t += e.w;
    return t;
  }

  EdgeId find_edge(VertexId a, VertexId b) const {
    for (EdgeId e : adj_[a])
      if (edges_[e].other(a) == b) return e;
    return -1;
  }

 private:
  void validate() const {
    if (n_ < 2) throw BuildError("network needs at least two vertices");
    std::set<std::pair<VertexId, VertexId>> seen;
    Length total = 0;
    for (const Edge& e : edges_) {
      if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
        throw BuildError("vertex id out of range");
      if (e.u == e.v) throw NotSimple("loop edge");
      if (!seen.insert(std::minmax(e.u, e.v)).second)
        throw NotSimple("parallel edge");
      if (e.w <= 0) throw NonPositiveWeight("edge weight must be positive");
      total += e.w;
      if (total > kMaxTotalWeight * kScale)
        throw BuildError("total network weight exceeds exactness budget");
    }
  }

  void check_connected() const {
    std::vector<char> vis(n_, 0);
    std::vector<VertexId> stack = {0};
    vis[0] = 1;
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      for (EdgeId e : adj_[x]) {
        VertexId y = edges_[e].other(x);
        if (!vis[y]) {
          vis[y] = 1;
          stack.push_back(y);
        }
      }
    }
    for (VertexId v = 0; v < n_; ++v)
      if (!vis[v]) throw NotConnected("network is not connected");
  }

  VertexId n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> adj_;
};

inline Network build_network(
    VertexId n, const std::vector<std::tuple<VertexId, VertexId, Length>>& es) {
  std::vector<Edge> edges;
  edges.reserve(es.size());
  for (auto& [u, v, w] : es) edges.push_back({u, v, w});
  return Network(n, std::move(edges));
}

/// A point on an edge, held as an exact offset from the edge's u endpoint in
/// half-micro units.  Offsets 0 and w denote the endpoints themselves.
struct PointOnEdge {
  EdgeId edge;
  Length offset;

  friend bool operator==(const PointOnEdge&, const PointOnEdge&) = default;
  friend auto operator<=>(const PointOnEdge&, const PointOnEdge&) = default;
};

inline PointOnEdge vertex_point(const Network& net, VertexId v) {
  EdgeId e = net.canonical_edge(v);
  return {e, net.edge(e).u == v ? Length{0} : net.edge(e).w};
}

/// Snaps endpoint offsets to the vertex's lowest-index incident edge so that
/// point sets compare as plain sets.
inline PointOnEdge canonicalize(const Network& net, PointOnEdge p) {
  const Edge& e = net.edge(p.edge);
  if (p.offset == 0) return vertex_point(net, e.u);
  if (p.offset == e.w) return vertex_point(net, e.v);
  return p;
}

inline PointOnEdge make_point(const Network& net, EdgeId e, Length offset) {
  if (e < 0 || e >= net.edge_count()) throw InvalidQuery("edge id out of range");
  if (offset < 0 || offset > net.edge(e).w)
    throw InvalidQuery("offset outside edge");
  return canonicalize(net, {e, offset});
}

/// Exact farthest distance together with every point attaining it.
struct FarthestResult {
  Length distance = -1;
  std::vector<PointOnEdge> points;  // canonical, sorted, unique

  void add(Length d, PointOnEdge p) {
    if (d < distance) return;
    if (d > distance) {
      distance = d;
      points.clear();
    }
    points.push_back(p);
  }

  void merge(const FarthestResult& other) {
    if (other.distance < distance) return;
    if (other.distance > distance) {
      distance = other.distance;
      points.clear();
    }
    points.insert(points.end(), other.points.begin(), other.points.end());
  }

  void finish() {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
  }

  friend bool operator==(const FarthestResult&, const FarthestResult&) =
      default;
};

// ---------------------------------------------------------------------------
// Text format: line 1 "n m", then m lines "u v w" (0-based ids, decimal w).

inline Network read_network(std::istream& in) {
  std::string line;
  long long n = 0, m = 0;
  if (!(in >> n >> m)) throw ParseError("missing network header");
  if (n < 0 || m < 0) throw ParseError("negative counts");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u, v;
    std::string w;
    if (!(in >> u >> v >> w)) throw ParseError("truncated edge list");
    edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v),
                     parse_decimal_weight(w)});
  }
  return Network(static_cast<VertexId>(n), std::move(edges));
}

inline void write_network(std::ostream& out, const Network& net) {
  out << net.vertex_count() << ' ' << net.edge_count() << '\n';
  for (const Edge& e : net.edges())
    out << e.u << ' ' << e.v << ' ' << format_decimal(e.w) << '\n';
}

}  // namespace spfar

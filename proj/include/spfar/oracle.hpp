#pragma once

#include <queue>
#include <vector>

#include "spfar/network.hpp"

namespace spfar {

/// Label-setting shortest-path search from a point source.  The source may be
/// an edge-interior point; its two half-edges seed the heap.
inline std::vector<Length> distances_from(const Network& net, PointOnEdge p) {
  std::vector<Length> dist(net.vertex_count(), -1);
  using Item = std::pair<Length, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const Edge& pe = net.edge(p.edge);
  auto seed = [&](VertexId v, Length d) { heap.push({d, v}); };
  if (p.offset == 0) {
    seed(pe.u, 0);
  } else if (p.offset == pe.w) {
    seed(pe.v, 0);
  } else {
    seed(pe.u, p.offset);
    seed(pe.v, pe.w - p.offset);
  }
  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (dist[x] >= 0) continue;
    dist[x] = d;
    for (EdgeId e : net.incident(x)) {
      VertexId y = net.edge(e).other(x);
      if (dist[y] < 0) heap.push({d + net.edge(e).w, y});
    }
  }
  return dist;
}

/// Exact shortest-path distance between two points, which may lie in edge
/// interiors.
inline Length network_distance(const Network& net, PointOnEdge p,
                               PointOnEdge q) {
  p = canonicalize(net, p);
  q = canonicalize(net, q);
  std::vector<Length> dist = distances_from(net, p);
  const Edge& qe = net.edge(q.edge);
  Length best = dist[qe.u] + q.offset;
  best = std::min(best, dist[qe.v] + (qe.w - q.offset));
  if (q.edge == p.edge) {
    Length direct = p.offset > q.offset ? p.offset - q.offset
                                        : q.offset - p.offset;
    best = std::min(best, direct);
  }
  return best;
}

/// Brute-force farthest-point oracle: one shortest-path search, then the
/// per-edge peak formula.  Grounds every acceptance test in the project.
inline FarthestResult oracle_farthest(const Network& net, PointOnEdge p) {
  p = canonicalize(net, p);
  std::vector<Length> dist = distances_from(net, p);
  FarthestResult res;
  for (VertexId v = 0; v < net.vertex_count(); ++v)
    res.add(dist[v], vertex_point(net, v));

  // Interior candidates.  The query's own edge is split at p so that the
  // direct along-edge route is accounted for exactly.
  auto scan = [&](EdgeId e, Length lo, Length hi, Length du, Length dv) {
    // Sub-edge [lo,hi] of e, entry distances du at lo and dv at hi.
    Length len = hi - lo;
    Length num = dv + len - du;  // 2 * peak offset from lo
    if (num <= 0 || num >= 2 * len) return;  // peak at/beyond an endpoint
    Length x2 = num;                         // even by parity of distances
    Length value = (du + dv + len) / 2;
    res.add(value, canonicalize(net, {e, lo + x2 / 2}));
  };
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const Edge& ed = net.edge(e);
    if (e == p.edge && p.offset > 0 && p.offset < ed.w) {
      scan(e, 0, p.offset, dist[ed.u], 0);
      scan(e, p.offset, ed.w, 0, dist[ed.v]);
    } else {
      scan(e, 0, ed.w, dist[ed.u], dist[ed.v]);
    }
  }
  res.finish();
  return res;
}

}  // namespace spfar

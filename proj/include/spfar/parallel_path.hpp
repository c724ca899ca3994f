#pragma once

#include <algorithm>
#include <vector>

#include "spfar/cascade.hpp"
#include "spfar/network.hpp"
#include "spfar/probes.hpp"

// Farthest-point structure for parallel-path networks: p internally
// disjoint u-v paths P_1..P_p with w_1 <= ... <= w_p and d(u,v) = w_1.

namespace spfar {

class NotParallelPath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class QueryCase { Left, Middle, Right };

struct PPPath {
  std::vector<VertexId> verts;  // u = verts[0], ..., verts.back() = v
  std::vector<EdgeId> edges;    // edges[k] joins verts[k], verts[k+1]
  std::vector<Length> pref;     // arc-length of verts[k] from u
  Length w = 0;
};

struct ParallelPathStructure {
  Network net;
  VertexId u = -1, v = -1;
  std::vector<PPPath> paths;  // sorted by w ascending
  Length duv = 0;             // = w_1

  // Path indices grouped by the two largest distinct weights.
  std::vector<int> top_class;     // w_j == w_p
  std::vector<int> second_class;  // w_j == largest weight below w_p

  // Middle-case machinery: one cascade over the bar v_j .. bar u_j
  // sub-paths of every path with w_j == w_{p-1}.
  std::vector<int> cascade_paths;
  std::vector<std::vector<int>> cascade_vert;  // vertex index per key
  CascadeStructure cascade{std::vector<std::vector<Length>>{}};
  std::vector<int> cascade_slot;  // path index -> list position or -1

  std::vector<int> edge_path;  // edge id -> path index
  std::vector<int> edge_pos;   // edge id -> position within the path
  std::vector<int> bar_u_edge;  // per path: edge index holding bar u_j

  Length bar_u_pos(int i) const { return (duv + paths[i].w) / 2; }
  Length bar_v_pos(int i) const { return (paths[i].w - duv) / 2; }
};

namespace detail {

inline PointOnEdge path_point_at_edge(const ParallelPathStructure& s, int pi,
                                      int k, Length arclen) {
  const PPPath& P = s.paths[pi];
  Length off = arclen - P.pref[k];
  const Edge& e = s.net.edge(P.edges[k]);
  Length o = e.u == P.verts[k] ? off : e.w - off;
  return canonicalize(s.net, {P.edges[k], o});
}

/// Locates arclen on path pi by binary search over the prefix sums.
inline PointOnEdge path_point(const ParallelPathStructure& s, int pi,
                              Length arclen) {
  const PPPath& P = s.paths[pi];
  int lo = 0, hi = static_cast<int>(P.edges.size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    probe();
    if (P.pref[mid] <= arclen)
      lo = mid;
    else
      hi = mid - 1;
  }
  return path_point_at_edge(s, pi, lo, arclen);
}

}  // namespace detail

inline ParallelPathStructure build_parallel_path(const Network& net,
                                                 VertexId u, VertexId v) {
  if (u == v) throw NotParallelPath("terminals coincide");
  for (VertexId x = 0; x < net.vertex_count(); ++x)
    if (x != u && x != v && net.incident(x).size() != 2)
      throw NotParallelPath("internal vertex degree != 2");

  ParallelPathStructure s{net};
  s.u = u;
  s.v = v;
  std::vector<bool> used(net.edge_count(), false);
  for (EdgeId e0 : net.incident(u)) {
    if (used[e0]) continue;
    PPPath P;
    P.verts.push_back(u);
    P.pref.push_back(0);
    VertexId x = u;
    EdgeId e = e0;
    while (true) {
      used[e] = true;
      VertexId y = net.edge(e).other(x);
      P.edges.push_back(e);
      P.verts.push_back(y);
      P.pref.push_back(P.pref.back() + net.edge(e).w);
      if (y == v) break;
      if (y == u) throw NotParallelPath("cycle through a terminal");
      EdgeId nxt = net.incident(y)[0] == e ? net.incident(y)[1]
                                           : net.incident(y)[0];
      x = y;
      e = nxt;
    }
    P.w = P.pref.back();
    s.paths.push_back(std::move(P));
  }
  for (bool b : used)
    if (!b) throw NotParallelPath("edges outside the u-v paths");

  std::sort(s.paths.begin(), s.paths.end(),
            [](const PPPath& a, const PPPath& b) { return a.w < b.w; });
  s.duv = s.paths.front().w;

  int p = static_cast<int>(s.paths.size());
  s.edge_path.assign(net.edge_count(), -1);
  s.edge_pos.assign(net.edge_count(), -1);
  for (int i = 0; i < p; ++i)
    for (std::size_t k = 0; k < s.paths[i].edges.size(); ++k) {
      s.edge_path[s.paths[i].edges[k]] = i;
      s.edge_pos[s.paths[i].edges[k]] = static_cast<int>(k);
    }

  s.bar_u_edge.assign(p, 0);
  for (int j = 0; j < p; ++j) {
    const PPPath& P = s.paths[j];
    Length bu = s.bar_u_pos(j);
    int k = 0;
    while (k + 1 < static_cast<int>(P.edges.size()) && P.pref[k + 1] < bu) ++k;
    s.bar_u_edge[j] = k;
  }

  Length wp = s.paths.back().w;
  for (int i = 0; i < p; ++i)
    if (s.paths[i].w == wp) s.top_class.push_back(i);
  Length w2 = -1;
  for (int i = p - 1; i >= 0; --i)
    if (s.paths[i].w < wp) {
      w2 = s.paths[i].w;
      break;
    }
  for (int i = 0; i < p; ++i)
    if (s.paths[i].w == w2) s.second_class.push_back(i);

  // Cascade lists over every path of length w_{p-1}: keys are arc-lengths
  // measured backwards from bar u_j, covering the sub-path down to bar v_j.
  s.cascade_slot.assign(p, -1);
  if (p >= 2) {
    Length wp1 = s.paths[p - 2].w;
    std::vector<std::vector<Length>> lists;
    for (int j = 0; j < p; ++j) {
      if (s.paths[j].w != wp1) continue;
      const PPPath& P = s.paths[j];
      Length bu = s.bar_u_pos(j);
      Length bv = s.bar_v_pos(j);
      std::vector<Length> keys;
      std::vector<int> vidx;
      for (int k = static_cast<int>(P.verts.size()) - 1; k >= 0; --k) {
        if (P.pref[k] > bu) continue;
        if (P.pref[k] < bv) break;
        keys.push_back(bu - P.pref[k]);
        vidx.push_back(k);
      }
      s.cascade_slot[j] = static_cast<int>(lists.size());
      s.cascade_paths.push_back(j);
      lists.push_back(std::move(keys));
      s.cascade_vert.push_back(std::move(vidx));
    }
    s.cascade = CascadeStructure(std::move(lists));
  }
  return s;
}

namespace detail {

/// Path index and arc-length from u for a query point.
inline std::pair<int, Length> locate_pp(const ParallelPathStructure& s,
                                        PointOnEdge q) {
  if (q.edge < 0 || q.edge >= s.net.edge_count())
    throw InvalidQuery("query edge out of range");
  const Edge& e = s.net.edge(q.edge);
  if (q.offset < 0 || q.offset > e.w) throw InvalidQuery("query offset");
  int pi = s.edge_path[q.edge];
  int k = s.edge_pos[q.edge];
  const PPPath& P = s.paths[pi];
  Length t = e.u == P.verts[k] ? P.pref[k] + q.offset
                               : P.pref[k] + e.w - q.offset;
  return {pi, t};
}

}  // namespace detail

inline QueryCase classify_query(const ParallelPathStructure& s,
                                PointOnEdge q) {
  auto [i, t] = detail::locate_pp(s, q);
  if (t < s.bar_v_pos(i)) return QueryCase::Left;
  if (t > s.bar_u_pos(i)) return QueryCase::Right;
  return QueryCase::Middle;
}

inline FarthestResult farthest_points_pp(const ParallelPathStructure& s,
                                         PointOnEdge q) {
  auto [i, t] = detail::locate_pp(s, q);
  const int p = static_cast<int>(s.paths.size());
  FarthestResult fr;

  if (p == 1) {
    fr.add(t, vertex_point(s.net, s.u));
    fr.add(s.paths[0].w - t, vertex_point(s.net, s.v));
    fr.finish();
    return fr;
  }

  auto side_case = [&](bool from_u, Length tt) {
    // Farthest point on P_j (j != i) is its peak bar u_j (resp. bar v_j)
    // at distance tt + (w_1 + w_j)/2; only the largest classes can win.
    auto add_class = [&](const std::vector<int>& cls) {
      for (int j : cls) {
        if (j == i) continue;
        Length pos = from_u ? s.bar_u_pos(j)
                            : s.paths[j].w - s.bar_u_pos(j);
        fr.add(tt + (s.duv + s.paths[j].w) / 2,
               detail::path_point(s, j, pos));
      }
    };
    add_class(s.top_class);
    if (s.top_class.size() == 1 && s.top_class[0] == i)
      add_class(s.second_class);
    // Peak on the query's own path, past q on the far side.
    Length own_pos = from_u ? t + (s.duv + s.paths[i].w) / 2
                            : t - (s.duv + s.paths[i].w) / 2;
    fr.add((s.duv + s.paths[i].w) / 2, detail::path_point(s, i, own_pos));
  };

  Length bv = s.bar_v_pos(i), bu = s.bar_u_pos(i);
  if (t < bv) {
    side_case(true, t);
  } else if (t > bu) {
    side_case(false, s.paths[i].w - t);
  } else {
    // Middle: bar q_j sits at arc-length tau before bar u_j (Lemma 2(ii)).
    Length tau = t - bv;
    std::vector<int> target;
    if (s.top_class.size() == 1 && s.top_class[0] == i)
      target = s.second_class;
    else
      target = s.top_class;
    bool in_cascade = true;
    for (int j : target)
      if (s.cascade_slot[j] < 0) in_cascade = false;
    if (in_cascade) {
      std::vector<int> res = s.cascade.query(tau);
      for (int j : target) {
        if (j == i) continue;
        int l = s.cascade_slot[j];
        int r = res[l];
        Length val = (s.paths[i].w + s.paths[j].w) / 2;
        Length pos = s.bar_u_pos(j) - tau;
        if (r < 0) {
          // Above every stored vertex: still on bar u_j's own edge.
          fr.add(val,
                 detail::path_point_at_edge(s, j, s.bar_u_edge[j], pos));
        } else {
          int vi = s.cascade_vert[l][r];
          if (s.paths[j].pref[vi] == pos)
            fr.add(val, vertex_point(s.net, s.paths[j].verts[vi]));
          else
            fr.add(val, detail::path_point_at_edge(s, j, vi - 1, pos));
        }
      }
    } else {
      // Unique strictly longest target path: direct binary search.
      for (int j : target) {
        if (j == i) continue;
        fr.add((s.paths[i].w + s.paths[j].w) / 2,
               detail::path_point(s, j, s.bar_u_pos(j) - tau));
      }
    }
  }
  fr.finish();
  return fr;
}

inline Length farthest_distance_pp(const ParallelPathStructure& s,
                                   PointOnEdge q) {
  auto [i, t] = detail::locate_pp(s, q);
  const int p = static_cast<int>(s.paths.size());
  if (p == 1) return std::max(t, s.paths[0].w - t);
  Length wj;  // largest weight among the other paths
  if (s.top_class.size() == 1 && s.top_class[0] == i)
    wj = s.paths[s.second_class.back()].w;
  else
    wj = s.paths.back().w;
  Length bv = s.bar_v_pos(i), bu = s.bar_u_pos(i);
  if (t < bv)
    return std::max(t + (s.duv + wj) / 2, (s.duv + s.paths[i].w) / 2);
  if (t > bu)
    return std::max(s.paths[i].w - t + (s.duv + wj) / 2,
                    (s.duv + s.paths[i].w) / 2);
  return (s.paths[i].w + wj) / 2;
}

}  // namespace spfar

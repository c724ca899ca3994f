#pragma once

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spfar/bead_chain.hpp"
#include "spfar/network.hpp"
#include "spfar/pl.hpp"
#include "spfar/probes.hpp"

// Farthest-point structure for two-terminal series-parallel networks.
//
// The network is reduced to a single edge by reverting series and parallel
// compositions; the recorded creation history yields a parse tree.  The
// decomposition nests abacus-style structures: each node is a maximal
// parallel-path subnetwork whose chains carry real arcs (two-path parallel
// components) and child components.  A child appears on its parent chain as
// its shortest terminal path plus an exact farthest-into profile, the
// child's own top envelope translated through the entry distances, so every
// envelope value at every level is an exact network distance.

namespace spfar {

class NotSeriesParallel : public BuildError {
 public:
  using BuildError::BuildError;
};

struct SPOperation {
  bool series = false;
  int parent = -1;     // edge the operation acts on (creation direction)
  int e1 = -1, e2 = -1;  // series splits parent into e1, e2; parallel adds e1
  VertexId x = -1;     // new vertex (series)
  VertexId va = -1;    // endpoint of parent adjacent to e1 (series)
  Length w1 = 0;       // weight of e1
};

struct CreationHistory {
  VertexId u = -1, v = -1;
  int root_edge = -1;
  Length root_w = 0;
  long long s = 0, p = 0;
  std::vector<SPOperation> ops;  // creation order, replayed from root_edge
  int edge_ids = 0;              // total edge ids ever used
  int orig_edges = 0;            // ids 0..orig_edges-1 are network edges
};

namespace detail {

struct SPParseNode {
  int kind = 0;  // 0 leaf, 1 series, 2 parallel
  EdgeId edge = -1;
  int l = -1, r = -1;
  bool lrev = false, rrev = false;
  VertexId ta = -1, tb = -1;
  Length sh = 0, lo = 0;  // shortest / longest terminal path length
};

struct SPParse {
  CreationHistory hist;
  std::vector<SPParseNode> nodes;
  int root = -1;
};

inline SPParse sp_parse(const Network& net) {
  const int n = net.vertex_count();
  const int m = net.edge_count();
  if (m == 0) throw NotSeriesParallel("network has no edges");
  SPParse P;
  const int cap = m + n + 2;
  std::vector<VertexId> ea(cap, -1), eb(cap, -1);
  std::vector<Length> ew(cap, 0);
  std::vector<char> alive(cap, 0);
  std::vector<int> pidx(cap, -1);
  std::vector<std::vector<int>> inc(n);
  std::vector<long long> deg(n, 0);
  auto& ops = P.hist.ops;

  for (EdgeId e = 0; e < m; ++e) {
    const Edge& ed = net.edge(e);
    ea[e] = ed.u;
    eb[e] = ed.v;
    ew[e] = ed.w;
    alive[e] = 1;
    pidx[e] = static_cast<int>(P.nodes.size());
    P.nodes.push_back({0, e, -1, -1, false, false, ed.u, ed.v, ed.w, ed.w});
    inc[ed.u].push_back(e);
    inc[ed.v].push_back(e);
    ++deg[ed.u];
    ++deg[ed.v];
  }
  int next_id = m;
  long long alive_cnt = m;
  std::unordered_map<long long, int> pmap;  // endpoint pair -> alive edge
  auto key = [&](VertexId x, VertexId y) {
    if (x > y) std::swap(x, y);
    return static_cast<long long>(x) * n + y;
  };
  std::vector<VertexId> st;  // degree-2 contraction candidates

  auto do_merge = [&](int keep, int rem) {
    ops.push_back({false, keep, rem, -1, -1, -1, ew[rem]});
    const SPParseNode& nk = P.nodes[pidx[keep]];
    const SPParseNode& nr = P.nodes[pidx[rem]];
    int pn = static_cast<int>(P.nodes.size());
    P.nodes.push_back({2, -1, pidx[keep], pidx[rem], nk.ta != ea[keep],
                       nr.ta != ea[keep], ea[keep], eb[keep],
                       std::min(nk.sh, nr.sh), std::max(nk.lo, nr.lo)});
    pidx[keep] = pn;
    alive[rem] = 0;
    --alive_cnt;
    --deg[ea[rem]];
    --deg[eb[rem]];
    if (deg[ea[rem]] == 2) st.push_back(ea[rem]);
    if (deg[eb[rem]] == 2) st.push_back(eb[rem]);
  };
  auto insert_edge = [&](int id) {
    auto [it, fresh] = pmap.try_emplace(key(ea[id], eb[id]), id);
    if (fresh) return;
    if (!alive[it->second]) {
      it->second = id;
      return;
    }
    do_merge(it->second, id);
  };
  auto erase_edge = [&](int id) {
    auto it = pmap.find(key(ea[id], eb[id]));
    if (it != pmap.end() && it->second == id) pmap.erase(it);
  };

  for (EdgeId e = 0; e < m; ++e) insert_edge(e);
  for (VertexId v = 0; v < n; ++v)
    if (deg[v] == 2) st.push_back(v);

  while (!st.empty()) {
    VertexId v = st.back();
    st.pop_back();
    if (deg[v] != 2) continue;
    auto& iv = inc[v];
    iv.erase(std::remove_if(iv.begin(), iv.end(),
                            [&](int e) { return !alive[e]; }),
             iv.end());
    if (iv.size() != 2) continue;
    int e1 = iv[0], e2 = iv[1];
    VertexId x = ea[e1] == v ? eb[e1] : ea[e1];
    VertexId y = ea[e2] == v ? eb[e2] : ea[e2];
    if (x == y) continue;  // parallel pair, handled at insertion
    alive[e1] = alive[e2] = 0;
    alive_cnt -= 2;
    erase_edge(e1);
    erase_edge(e2);
    deg[v] -= 2;
    --deg[x];
    --deg[y];
    int pn = static_cast<int>(P.nodes.size());
    P.nodes.push_back({1, -1, pidx[e1], pidx[e2], P.nodes[pidx[e1]].ta != x,
                       P.nodes[pidx[e2]].ta != v, x, y,
                       P.nodes[pidx[e1]].sh + P.nodes[pidx[e2]].sh,
                       P.nodes[pidx[e1]].lo + P.nodes[pidx[e2]].lo});
    ops.push_back({true, next_id, e1, e2, v, x, ew[e1]});
    int id = next_id++;
    ea[id] = x;
    eb[id] = y;
    ew[id] = ew[e1] + ew[e2];
    alive[id] = 1;
    pidx[id] = pn;
    inc[x].push_back(id);
    inc[y].push_back(id);
    ++deg[x];
    ++deg[y];
    ++alive_cnt;
    insert_edge(id);
    if (deg[x] == 2) st.push_back(x);
    if (deg[y] == 2) st.push_back(y);
  }
  if (alive_cnt != 1) throw NotSeriesParallel("reduction stalled");
  int r = -1;
  for (int id = 0; id < next_id; ++id)
    if (alive[id]) r = id;
  P.root = pidx[r];
  P.hist.u = ea[r];
  P.hist.v = eb[r];
  P.hist.root_edge = r;
  P.hist.root_w = ew[r];
  P.hist.edge_ids = next_id;
  P.hist.orig_edges = m;
  std::reverse(ops.begin(), ops.end());
  for (const SPOperation& op : ops) (op.series ? P.hist.s : P.hist.p) += 1;
  return P;
}

}  // namespace detail

/// Reduces the network by reverting series and parallel compositions and
/// records the creation history.  Throws NotSeriesParallel on a stall.
inline CreationHistory sp_reduce(const Network& net) {
  return detail::sp_parse(net).hist;
}

struct ReplayEdge {
  VertexId u = -1, v = -1;
  Length w = 0;
};

/// Replays a creation history from the root edge; the result is indexed by
/// edge id and must reproduce the original network.
inline std::vector<ReplayEdge> replay_history(const CreationHistory& h) {
  std::unordered_map<int, ReplayEdge> cur;
  cur[h.root_edge] = {h.u, h.v, h.root_w};
  for (const SPOperation& op : h.ops) {
    auto it = cur.find(op.parent);
    if (it == cur.end())
      throw std::logic_error("history references a missing edge");
    ReplayEdge pe = it->second;
    if (op.series) {
      VertexId vb = pe.u == op.va ? pe.v : pe.u;
      cur.erase(it);
      cur[op.e1] = {op.va, op.x, op.w1};
      cur[op.e2] = {op.x, vb, pe.w - op.w1};
    } else {
      cur[op.e1] = {pe.u, pe.v, op.w1};
    }
  }
  std::vector<ReplayEdge> out(h.orig_edges);
  for (auto& [id, e] : cur) {
    if (id < 0 || id >= h.orig_edges)
      throw std::logic_error("replay left a non-original edge");
    out[id] = e;
  }
  return out;
}

struct PathLengths {
  Length shortest = 0, longest = 0;

  friend bool operator==(const PathLengths&, const PathLengths&) = default;
};

/// Shortest and longest terminal path lengths of the subnetwork grown from
/// each edge id of the history (snapshot at the moment the id is consumed).
inline std::vector<PathLengths> terminal_path_lengths(
    const CreationHistory& h) {
  std::vector<Length> w(h.edge_ids, 0);
  w[h.root_edge] = h.root_w;
  for (const SPOperation& op : h.ops) {
    if (op.series) {
      w[op.e1] = op.w1;
      w[op.e2] = w[op.parent] - op.w1;
    } else {
      w[op.e1] = op.w1;
    }
  }
  std::vector<PathLengths> val(h.edge_ids), out(h.edge_ids);
  for (int id = 0; id < h.orig_edges; ++id) val[id] = {w[id], w[id]};
  for (auto it = h.ops.rbegin(); it != h.ops.rend(); ++it) {
    const SPOperation& op = *it;
    if (op.series) {
      out[op.e1] = val[op.e1];
      out[op.e2] = val[op.e2];
      val[op.parent] = {val[op.e1].shortest + val[op.e2].shortest,
                        val[op.e1].longest + val[op.e2].longest};
    } else {
      out[op.e1] = val[op.e1];
      val[op.parent] = {std::min(val[op.parent].shortest, val[op.e1].shortest),
                        std::max(val[op.parent].longest, val[op.e1].longest)};
    }
  }
  out[h.root_edge] = val[h.root_edge];
  return out;
}

inline constexpr Length kNoExt = std::numeric_limits<Length>::max() / 4;

struct SPAtt {
  bool is_child = false;
  Length pa = 0, pb = 0;  // span on the chain path
  // Real arc.
  std::vector<VertexId> verts;  // a ... b
  std::vector<EdgeId> edges;
  std::vector<Length> pref;
  Length walpha = 0;
  // Child component.
  int child = -1;
};

struct SPChain {
  std::vector<VertexId> verts;  // path a ... b (children's paths inlined)
  std::vector<EdgeId> edges;
  std::vector<Length> pref;
  Length w = 0;
  std::vector<SPAtt> atts;
  int overlong = -1;  // real arc whose span exceeds the rest of the cycle
  bool has_levels = false;
  TwoLevels levels;  // farthest-into-attachment over the closure cycle (x8)
  Envelope env;      // chain envelope over the virtual-edge window (x8)
  FarthestResult from_u, from_v;
};

struct SPNode {
  VertexId a = -1, b = -1;
  int parent = -1, pchain = -1, patt = -1;
  Length dsp = 0;    // shortest terminal path == min chain weight
  Length wlong = 0;  // longest terminal path
  Length ext = kNoExt;  // shortest outside a-b return route
  Length D = 0;         // min(dsp, ext): virtual closure edge weight
  Length wp = 0;        // max chain weight == virtual edge length
  std::vector<SPChain> chains;
  bool has_global = false;
  TwoLevels global;  // over the per-chain envelopes (owner = chain)
};

struct AbacusTree {
  Network net;
  CreationHistory history;
  std::vector<SPNode> nodes;  // nodes[0] is the root; parents precede children
  // Edge locator: deepest owning node.
  std::vector<int> e_node, e_chain, e_att, e_sub;
  std::vector<char> e_on_att;
};

namespace detail {

inline PointOnEdge sp_path_point(const AbacusTree& T, int ni, int ci,
                                 Length pos) {
  const SPChain& c = T.nodes[ni].chains[ci];
  int k = locate_pref(c.pref, pos);
  if (k == static_cast<int>(c.edges.size())) --k;
  return oriented_point(T.net, c.edges[k], c.verts[k], pos - c.pref[k]);
}

inline PointOnEdge sp_att_point(const AbacusTree& T, int ni, int ci, int k,
                                Length off) {
  const SPAtt& a = T.nodes[ni].chains[ci].atts[k];
  int e = locate_pref(a.pref, off);
  if (e == static_cast<int>(a.edges.size())) --e;
  return oriented_point(T.net, a.edges[e], a.verts[e], off - a.pref[e]);
}

inline Length sp_cycle(const AbacusTree& T, int ni, int ci) {
  return T.nodes[ni].chains[ci].w + T.nodes[ni].D;
}

/// Farthest-into-attachment value (x8 grid) from the entry distances to its
/// two terminals.  Child profiles are the child's exact top envelope.
inline Length sp_att_val8(const AbacusTree& T, const SPAtt& a, Length eA8,
                          Length eB8) {
  if (!a.is_child) return (eA8 + eB8) / 2 + 4 * a.walpha;
  const SPNode& ch = T.nodes[a.child];
  Length t8 = (eA8 - eB8) / 2 + 4 * ch.wp;
  Length lam8 = (eA8 + eB8) / 2 - 4 * ch.wp;
  t8 = std::clamp(t8, 4 * (ch.wp - ch.D), 4 * (ch.wp + ch.D));
  return lam8 + ch.global.u1.value_at(t8);
}

/// Builds one attachment function over [lo, hi] (x8 grid) from an entry
/// evaluator.  Child breakpoints are pulled back through the entry map.
template <class EF>
inline PLFunction sp_make_fn(const AbacusTree& T, const SPAtt& a, Length lo,
                             Length hi, std::vector<Length> xs, EF entries,
                             int owner) {
  xs.push_back(lo);
  xs.push_back(hi);
  xs.erase(std::remove_if(xs.begin(), xs.end(),
                          [&](Length x) { return x < lo || x > hi; }),
           xs.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (a.is_child) {
    const SPNode& ch = T.nodes[a.child];
    const std::vector<Length>& cxs = ch.global.u1.xs;
    auto t8at = [&](Length x) {
      auto [eA, eB] = entries(x);
      return (eA - eB) / 2 + 4 * ch.wp;
    };
    std::vector<Length> extra;
    for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
      Length t0 = t8at(xs[s]), t1 = t8at(xs[s + 1]);
      if (t0 == t1) continue;
      Length tlo = std::min(t0, t1), thi = std::max(t0, t1);
      auto it = std::upper_bound(cxs.begin(), cxs.end(), tlo);
      for (; it != cxs.end() && *it < thi; ++it)
        extra.push_back(t1 > t0 ? xs[s] + (*it - t0) : xs[s] + (t0 - *it));
    }
    xs.insert(xs.end(), extra.begin(), extra.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  }
  PLFunction f;
  f.owner = owner;
  f.xs = xs;
  f.vs.reserve(xs.size());
  for (Length x : xs) {
    auto [eA, eB] = entries(x);
    f.vs.push_back(sp_att_val8(T, a, eA, eB));
  }
  return f;
}

FarthestResult sp_entry_query(const AbacusTree& T, int ni, Length dA,
                              Length dB);

/// Resolves the node's global envelope at x8 into points; distances are
/// shift + value/8.  exclude < 0 keeps every chain.
inline void sp_resolve_global(const AbacusTree& T, int ni, Length x8,
                              Length shift, int exclude, FarthestResult& fr) {
  const SPNode& nd = T.nodes[ni];
  auto [val8, atts] = eval_excluding(nd.global.u1, nd.global.u2, x8, exclude);
  Length dist = shift + val8 / 8;
  if (dist < fr.distance) return;
  const Length tq = x8 / 8;
  for (const EnvAtt& ca : atts) {
    int j = ca.owner;
    const SPChain& c = nd.chains[j];
    for (const EnvAtt& fa : c.env.attainers_at(x8)) {
      if (fa.owner == static_cast<int>(c.atts.size())) {
        fr.add(dist, sp_path_point(T, ni, j, (c.w + nd.wp) / 2 - tq));
      } else {
        const SPAtt& a = c.atts[fa.owner];
        Length eA = std::min(tq + a.pa, nd.wp - tq + c.w - a.pa);
        Length eB = std::min(tq + a.pb, nd.wp - tq + c.w - a.pb);
        if (!a.is_child)
          fr.add(dist,
                 sp_att_point(T, ni, j, fa.owner, (a.walpha + eB - eA) / 2));
        else
          fr.merge(sp_entry_query(T, a.child, shift + eA, shift + eB));
      }
    }
  }
}

/// Farthest points inside node ni from an outside query at distances
/// (dA, dB) to the node's terminals.
inline FarthestResult sp_entry_query(const AbacusTree& T, int ni, Length dA,
                                     Length dB) {
  const SPNode& nd = T.nodes[ni];
  probe();
  Length x8 = std::clamp(4 * (dA - dB + nd.wp), 4 * (nd.wp - nd.D),
                         4 * (nd.wp + nd.D));
  FarthestResult fr;
  sp_resolve_global(T, ni, x8, (dA + dB - nd.wp) / 2, -1, fr);
  fr.finish();
  return fr;
}

/// Farthest-into-attachment candidates seen from projected cycle position x
/// (shift base), excluding attachment `exclude`.
inline void sp_atts_query(const AbacusTree& T, int ni, int ci, Length x,
                          Length base, int exclude, FarthestResult& fr) {
  const SPNode& nd = T.nodes[ni];
  const SPChain& c = nd.chains[ci];
  if (c.atts.empty()) return;
  const Length C = c.w + nd.D;
  std::vector<int> ids;
  if (c.has_levels) {
    auto [v8, at] = eval_excluding(c.levels.u1, c.levels.u2, 8 * x, exclude);
    (void)v8;
    for (const EnvAtt& ea : at) ids.push_back(ea.owner);
  } else {
    for (int k = 0; k < static_cast<int>(c.atts.size()); ++k)
      if (k != exclude && k != c.overlong) ids.push_back(k);
  }
  if (c.overlong >= 0 && c.overlong != exclude) ids.push_back(c.overlong);
  for (int k : ids) {
    const SPAtt& a = c.atts[k];
    Length eA = bc_dist(x, a.pa, C);
    Length eB = bc_dist(x, a.pb, C);
    if (!a.is_child) {
      fr.add(base + (eA + eB + a.walpha) / 2,
             sp_att_point(T, ni, ci, k, (a.walpha + eB - eA) / 2));
    } else {
      Length val = base + sp_att_val8(T, a, 8 * eA, 8 * eB) / 8;
      if (val < fr.distance) continue;
      fr.merge(sp_entry_query(T, a.child, base + eA, base + eB));
    }
  }
}

/// Candidates on the chain path and at the terminals from projected cycle
/// position x (shift base); (fb_lo, fb_hi) is an open interval where the
/// projection identity does not hold.
inline void sp_cycle_part(const AbacusTree& T, int ni, int ci, Length x,
                          Length base, Length fb_lo, Length fb_hi,
                          FarthestResult& fr) {
  const SPNode& nd = T.nodes[ni];
  const SPChain& c = nd.chains[ci];
  const Length C = c.w + nd.D;
  Length anti = bc_mod(x + C / 2, C);
  if (anti <= c.w && !(anti > fb_lo && anti < fb_hi))
    fr.add(base + C / 2, sp_path_point(T, ni, ci, anti));
  fr.add(base + bc_dist(x, 0, C), vertex_point(T.net, nd.a));
  fr.add(base + bc_dist(x, c.w, C), vertex_point(T.net, nd.b));
}

inline void sp_inward_from_path(const AbacusTree& T, int ni, int ci, Length t,
                                FarthestResult& fr) {
  sp_cycle_part(T, ni, ci, t, 0, 1, 0, fr);
  sp_atts_query(T, ni, ci, t, 0, -1, fr);
}

inline void sp_inward_from_arc(const AbacusTree& T, int ni, int ci, int k,
                               Length o, FarthestResult& fr) {
  const SPNode& nd = T.nodes[ni];
  const SPChain& c = nd.chains[ci];
  const SPAtt& a = c.atts[k];
  const Length C = c.w + nd.D;
  const Length wbeta = a.pb - a.pa;
  const Length wgam = C - wbeta;
  if (k != c.overlong) {
    // Antipode of the little cycle alpha union beta covers the own arc and
    // the spanned sub-path exactly.
    const Length L = a.walpha + wbeta;
    Length ap = bc_mod(o + L / 2, L);
    fr.add(L / 2, ap <= a.walpha
                      ? sp_att_point(T, ni, ci, k, ap)
                      : sp_path_point(T, ni, ci, a.pb - (ap - a.walpha)));
    Length base, x;
    bool middle = false;
    if (2 * o < a.walpha - wbeta) {
      base = o;
      x = a.pa;
    } else if (2 * o > a.walpha + wbeta) {
      base = a.walpha - o;
      x = a.pb;
    } else {
      base = (a.walpha - wbeta) / 2;
      x = bc_mod(a.pa + o - base, C);
      middle = true;
    }
    sp_cycle_part(T, ni, ci, x, base, middle ? a.pa : 1, middle ? a.pb : 0,
                  fr);
    sp_atts_query(T, ni, ci, x, base, k, fr);
    return;
  }

  // Overlong arc: the short outside connection runs through the virtual
  // edge, so candidates are assembled from the entry distances directly.
  const Length wshort = wgam;
  Length da = std::min(o, a.walpha - o + wshort);
  Length db = std::min(a.walpha - o, o + wshort);
  {
    const Length L = a.walpha + wshort;
    Length ap = bc_mod(o + L / 2, L);
    if (ap <= a.walpha) fr.add(L / 2, sp_att_point(T, ni, ci, k, ap));
  }
  fr.add((da + db + wbeta) / 2,
         sp_path_point(T, ni, ci, a.pa + (db - da + wbeta) / 2));
  {
    Length g = (da - db + wgam) / 2;  // along gamma from b
    if (g <= c.w - a.pb)
      fr.add((da + db + wgam) / 2, sp_path_point(T, ni, ci, a.pb + g));
    else if (g >= c.w - a.pb + nd.D)
      fr.add((da + db + wgam) / 2,
             sp_path_point(T, ni, ci, g - (c.w - a.pb) - nd.D));
  }
  auto du_at = [&](Length t) { return std::min(t, c.w - t + nd.D); };
  auto dv_at = [&](Length t) { return std::min(c.w - t, t + nd.D); };
  fr.add(std::min(da + du_at(a.pa), db + du_at(a.pb)),
         vertex_point(T.net, nd.a));
  fr.add(std::min(da + dv_at(a.pa), db + dv_at(a.pb)),
         vertex_point(T.net, nd.b));
  Length base, x;
  if (2 * o < a.walpha - wgam) {
    base = o;
    x = a.pa;
  } else if (2 * o > a.walpha + wgam) {
    base = a.walpha - o;
    x = a.pb;
  } else {
    base = (a.walpha - wbeta) / 2;
    x = bc_mod(a.pa + o - base, C);
  }
  sp_atts_query(T, ni, ci, x, base, k, fr);
}

/// Farthest points on the other chains of node ni (and below them), seen
/// from the path representative (t, base) on chain ci.
inline void sp_outward(const AbacusTree& T, int ni, int ci, Length t,
                       Length base, FarthestResult& fr) {
  const SPNode& nd = T.nodes[ni];
  if (nd.chains.size() < 2) return;
  const SPChain& c = nd.chains[ci];
  Length du = base + std::min(t, c.w - t + nd.D);
  Length dv = base + std::min(c.w - t, t + nd.D);
  auto side = [&](Length d0, bool from_u_side) {
    for (int j = 0; j < static_cast<int>(nd.chains.size()); ++j) {
      if (j == ci) continue;
      const FarthestResult& lj =
          from_u_side ? nd.chains[j].from_u : nd.chains[j].from_v;
      for (const PointOnEdge& p : lj.points) fr.add(d0 + lj.distance, p);
    }
  };
  if (du + nd.D <= dv) {
    side(du, true);
  } else if (dv + nd.D <= du) {
    side(dv, false);
  } else {
    // Middle case: elongate the chain path onto the virtual edge.
    Length lam = (nd.wp - c.w) / 2;
    sp_resolve_global(T, ni, 8 * (t + lam), base - lam, ci, fr);
  }
}

struct SPLoc {
  int node = -1, chain = -1, att = -1;
  bool on_att = false;
  Length pos = 0;
};

inline SPLoc sp_locate(const AbacusTree& T, PointOnEdge q) {
  SPLoc l;
  l.node = T.e_node[q.edge];
  l.chain = T.e_chain[q.edge];
  const Edge& ed = T.net.edge(q.edge);
  int k = T.e_sub[q.edge];
  if (!T.e_on_att[q.edge]) {
    const SPChain& c = T.nodes[l.node].chains[l.chain];
    l.pos = c.pref[k] + (ed.u == c.verts[k] ? q.offset : ed.w - q.offset);
  } else {
    l.on_att = true;
    l.att = T.e_att[q.edge];
    const SPAtt& a = T.nodes[l.node].chains[l.chain].atts[l.att];
    l.pos = a.pref[k] + (ed.u == a.verts[k] ? q.offset : ed.w - q.offset);
  }
  return l;
}

/// Path representative (t, base): distances to every point outside the
/// query's own arc satisfy d(q,c) = base + d(path point t, c).
inline std::pair<Length, Length> sp_path_rep(const AbacusTree& T,
                                             const SPLoc& l) {
  if (!l.on_att) return {l.pos, 0};
  const SPNode& nd = T.nodes[l.node];
  const SPChain& c = nd.chains[l.chain];
  const SPAtt& a = c.atts[l.att];
  const Length wbeta = a.pb - a.pa;
  const Length wshort = std::min(wbeta, c.w + nd.D - wbeta);
  Length o = l.pos;
  if (2 * o <= a.walpha - wshort) return {a.pa, o};
  if (2 * o >= a.walpha + wshort) return {a.pb, a.walpha - o};
  return {a.pa + o - (a.walpha - wbeta) / 2, (a.walpha - wbeta) / 2};
}

struct SPBuilder {
  const Network& net;
  const SPParse& P;
  AbacusTree& T;

  void branches(int pi, bool rev, std::vector<std::pair<int, bool>>& out) {
    const SPParseNode& nd = P.nodes[pi];
    if (nd.kind == 2) {
      branches(nd.l, rev != nd.lrev, out);
      branches(nd.r, rev != nd.rrev, out);
    } else {
      out.push_back({pi, rev});
    }
  }

  void units(int pi, bool rev, std::vector<std::pair<int, bool>>& out) {
    const SPParseNode& nd = P.nodes[pi];
    if (nd.kind == 1) {
      if (!rev) {
        units(nd.l, nd.lrev, out);
        units(nd.r, nd.rrev, out);
      } else {
        units(nd.r, !nd.rrev, out);
        units(nd.l, !nd.lrev, out);
      }
    } else {
      out.push_back({pi, rev});
    }
  }

  bool pure_path(int pi, bool rev, std::vector<EdgeId>* edges) const {
    const SPParseNode& nd = P.nodes[pi];
    if (nd.kind == 0) {
      if (edges) edges->push_back(nd.edge);
      return true;
    }
    if (nd.kind == 2) return false;
    if (!rev)
      return pure_path(nd.l, nd.lrev, edges) && pure_path(nd.r, nd.rrev, edges);
    return pure_path(nd.r, !nd.rrev, edges) && pure_path(nd.l, !nd.lrev, edges);
  }

  int build_node(int pi, bool rev, VertexId a, VertexId b, int parent,
                 int pchain, int patt) {
    int id = static_cast<int>(T.nodes.size());
    T.nodes.emplace_back();
    {
      SPNode& nd = T.nodes[id];
      nd.a = a;
      nd.b = b;
      nd.parent = parent;
      nd.pchain = pchain;
      nd.patt = patt;
      nd.wlong = P.nodes[pi].lo;
    }
    std::vector<std::pair<int, bool>> brs;
    branches(pi, rev, brs);
    for (int bi = 0; bi < static_cast<int>(brs.size()); ++bi) {
      SPChain ch;
      ch.verts = {a};
      ch.pref = {0};
      VertexId cur = a;
      std::vector<std::pair<int, bool>> us;
      units(brs[bi].first, brs[bi].second, us);
      for (auto [ui, ur] : us) {
        const SPParseNode& un = P.nodes[ui];
        if (un.kind == 0) {
          EdgeId e = un.edge;
          T.e_node[e] = id;
          T.e_chain[e] = bi;
          T.e_on_att[e] = 0;
          T.e_sub[e] = static_cast<int>(ch.edges.size());
          ch.edges.push_back(e);
          cur = net.edge(e).other(cur);
          ch.verts.push_back(cur);
          ch.w += net.edge(e).w;
          ch.pref.push_back(ch.w);
          continue;
        }
        VertexId ua = ur ? un.tb : un.ta;
        VertexId ub = ur ? un.ta : un.tb;
        if (ua != cur) throw std::logic_error("parse traversal out of order");
        SPAtt att;
        att.pa = ch.w;
        std::vector<std::pair<int, bool>> pbrs;
        branches(ui, ur, pbrs);
        std::vector<EdgeId> p1, p2;
        bool absorb = pbrs.size() == 2 &&
                      pure_path(pbrs[0].first, pbrs[0].second, &p1) &&
                      pure_path(pbrs[1].first, pbrs[1].second, &p2);
        if (absorb) {
          auto plen = [&](const std::vector<EdgeId>& es) {
            Length w = 0;
            for (EdgeId e : es) w += net.edge(e).w;
            return w;
          };
          if (plen(p1) > plen(p2)) std::swap(p1, p2);
          for (EdgeId e : p1) {
            T.e_node[e] = id;
            T.e_chain[e] = bi;
            T.e_on_att[e] = 0;
            T.e_sub[e] = static_cast<int>(ch.edges.size());
            ch.edges.push_back(e);
            cur = net.edge(e).other(cur);
            ch.verts.push_back(cur);
            ch.w += net.edge(e).w;
            ch.pref.push_back(ch.w);
          }
          att.pb = ch.w;
          att.verts = {ua};
          att.pref = {0};
          int ai = static_cast<int>(ch.atts.size());
          VertexId acur = ua;
          for (EdgeId e : p2) {
            T.e_node[e] = id;
            T.e_chain[e] = bi;
            T.e_on_att[e] = 1;
            T.e_att[e] = ai;
            T.e_sub[e] = static_cast<int>(att.edges.size());
            att.edges.push_back(e);
            acur = net.edge(e).other(acur);
            att.verts.push_back(acur);
            att.pref.push_back(att.pref.back() + net.edge(e).w);
          }
          att.walpha = att.pref.back();
          ch.atts.push_back(std::move(att));
          continue;
        }
        att.is_child = true;
        att.child = build_node(ui, ur, ua, ub, id,
                               bi, static_cast<int>(ch.atts.size()));
        {
          const SPNode& cn = T.nodes[att.child];
          int sc = 0;
          for (int j = 1; j < static_cast<int>(cn.chains.size()); ++j)
            if (cn.chains[j].w < cn.chains[sc].w) sc = j;
          const SPChain& sp = cn.chains[sc];
          for (std::size_t e = 0; e < sp.edges.size(); ++e) {
            ch.edges.push_back(sp.edges[e]);
            ch.verts.push_back(sp.verts[e + 1]);
            ch.w += net.edge(sp.edges[e]).w;
            ch.pref.push_back(ch.w);
          }
        }
        att.pb = ch.w;
        ch.atts.push_back(std::move(att));
        cur = ub;
      }
      if (cur != b) throw std::logic_error("chain does not reach terminal");
      T.nodes[id].chains.push_back(std::move(ch));
    }
    {
      SPNode& nd = T.nodes[id];
      nd.dsp = nd.chains[0].w;
      nd.wp = nd.chains[0].w;
      for (const SPChain& c : nd.chains) {
        nd.dsp = std::min(nd.dsp, c.w);
        nd.wp = std::max(nd.wp, c.w);
      }
    }
    return id;
  }
};

}  // namespace detail

/// Decomposes a series-parallel network into the nested abacus tree and
/// builds the query machinery at every node.
inline AbacusTree decompose(const Network& net) {
  detail::SPParse P = detail::sp_parse(net);
  AbacusTree T{net};
  T.history = P.hist;
  T.e_node.assign(net.edge_count(), -1);
  T.e_chain.assign(net.edge_count(), -1);
  T.e_att.assign(net.edge_count(), -1);
  T.e_sub.assign(net.edge_count(), -1);
  T.e_on_att.assign(net.edge_count(), 0);
  detail::SPBuilder bld{net, P, T};
  bld.build_node(P.root, false, P.hist.u, P.hist.v, -1, -1, -1);

  // Effective closure weights, top down: ext is the shortest a-b return
  // route outside the component.
  for (int i = 0; i < static_cast<int>(T.nodes.size()); ++i) {
    SPNode& nd = T.nodes[i];
    if (i == 0) nd.ext = kNoExt;
    nd.D = std::min(nd.dsp, nd.ext);
    Length m1 = kNoExt, m2 = kNoExt;
    for (const SPChain& c : nd.chains) {
      if (c.w < m1) {
        m2 = m1;
        m1 = c.w;
      } else {
        m2 = std::min(m2, c.w);
      }
    }
    for (int j = 0; j < static_cast<int>(nd.chains.size()); ++j) {
      const SPChain& c = nd.chains[j];
      Length other = c.w == m1 ? m2 : m1;
      Length around = std::min(other, nd.ext);
      for (const SPAtt& a : c.atts) {
        if (!a.is_child) continue;
        T.nodes[a.child].ext =
            around >= kNoExt ? kNoExt : a.pa + around + (c.w - a.pb);
      }
    }
  }

  // Envelopes and side lists, bottom up: child profiles are ready before
  // their parent composes them.
  for (int i = static_cast<int>(T.nodes.size()) - 1; i >= 0; --i) {
    SPNode& nd = T.nodes[i];
    const Length D = nd.D;
    for (int j = 0; j < static_cast<int>(nd.chains.size()); ++j) {
      SPChain& c = nd.chains[j];
      const Length C = c.w + D;
      for (int k = 0; k < static_cast<int>(c.atts.size()); ++k) {
        const SPAtt& a = c.atts[k];
        if (!a.is_child && 2 * (a.pb - a.pa) > C) c.overlong = k;
      }
      std::vector<PLFunction> fs;
      const Length C8 = 8 * C;
      for (int k = 0; k < static_cast<int>(c.atts.size()); ++k) {
        if (k == c.overlong) continue;
        const SPAtt& a = c.atts[k];
        auto ef = [&](Length x8) {
          return std::pair<Length, Length>{
              detail::bc_dist(x8, 8 * a.pa, C8),
              detail::bc_dist(x8, 8 * a.pb, C8)};
        };
        std::vector<Length> bends = {
            8 * a.pa, 8 * a.pb, detail::bc_mod(8 * a.pa + C8 / 2, C8),
            detail::bc_mod(8 * a.pb + C8 / 2, C8)};
        fs.push_back(detail::sp_make_fn(T, a, 0, C8, std::move(bends), ef, k));
      }
      if (fs.size() >= 2) {
        c.levels = envelope_and_second_level(fs);
        c.has_levels = true;
      }
    }
    if (nd.chains.size() >= 2) {
      const Length W0 = 4 * (nd.wp - D), W1 = 4 * (nd.wp + D);
      std::vector<PLFunction> chain_fs;
      for (int j = 0; j < static_cast<int>(nd.chains.size()); ++j) {
        SPChain& c = nd.chains[j];
        std::vector<PLFunction> fs;
        for (int k = 0; k < static_cast<int>(c.atts.size()); ++k) {
          const SPAtt& a = c.atts[k];
          auto ef = [&](Length x8) {
            return std::pair<Length, Length>{
                std::min(x8 + 8 * a.pa, 8 * nd.wp - x8 + 8 * (c.w - a.pa)),
                std::min(x8 + 8 * a.pb, 8 * nd.wp - x8 + 8 * (c.w - a.pb))};
          };
          std::vector<Length> bends = {4 * (nd.wp + c.w) - 8 * a.pa,
                                       4 * (nd.wp + c.w) - 8 * a.pb};
          fs.push_back(
              detail::sp_make_fn(T, a, W0, W1, std::move(bends), ef, k));
        }
        // The chain path as a degenerate arc: its moving peak stays interior
        // throughout the window, giving a constant (w_p + w_j) / 2.
        PLFunction pf;
        pf.owner = static_cast<int>(c.atts.size());
        pf.xs = {W0, W1};
        pf.vs = {4 * (nd.wp + c.w), 4 * (nd.wp + c.w)};
        fs.push_back(std::move(pf));
        c.env = upper_envelope(fs);
        PLFunction g;
        g.owner = j;
        g.xs = c.env.xs;
        g.vs = c.env.vs;
        chain_fs.push_back(std::move(g));
      }
      nd.global = envelope_and_second_level(chain_fs);
      nd.has_global = true;
    }
    for (int j = 0; j < static_cast<int>(nd.chains.size()); ++j) {
      SPChain& c = nd.chains[j];
      detail::sp_inward_from_path(T, i, j, 0, c.from_u);
      c.from_u.finish();
      detail::sp_inward_from_path(T, i, j, c.w, c.from_v);
      c.from_v.finish();
    }
  }
  return T;
}

/// Exact farthest points from q: the home node answers within its own
/// component; each ancestor contributes the candidates outside the child
/// the walk came from, via the projected path representative.
inline FarthestResult farthest_points_sp(const AbacusTree& T, PointOnEdge q) {
  q = make_point(T.net, q.edge, q.offset);
  detail::SPLoc l = detail::sp_locate(T, q);
  FarthestResult fr;
  int ni = l.node;
  int ci = l.chain;
  if (!l.on_att)
    detail::sp_inward_from_path(T, ni, ci, l.pos, fr);
  else
    detail::sp_inward_from_arc(T, ni, ci, l.att, l.pos, fr);
  auto [t, base] = detail::sp_path_rep(T, l);
  detail::sp_outward(T, ni, ci, t, base, fr);
  Length da, db;
  {
    const SPNode& nd = T.nodes[ni];
    const SPChain& c = nd.chains[ci];
    da = base + std::min(t, c.w - t + nd.D);
    db = base + std::min(c.w - t, t + nd.D);
  }
  while (T.nodes[ni].parent >= 0) {
    int par = T.nodes[ni].parent;
    int pc = T.nodes[ni].pchain;
    int pk = T.nodes[ni].patt;
    const SPNode& pn = T.nodes[par];
    const SPChain& c = pn.chains[pc];
    const SPAtt& at = c.atts[pk];
    const Length dsp = at.pb - at.pa;
    Length tt = at.pa + (da - db + dsp) / 2;
    Length bb = (da + db - dsp) / 2;
    probe();
    detail::sp_cycle_part(T, par, pc, tt, bb, at.pa, at.pb, fr);
    detail::sp_atts_query(T, par, pc, tt, bb, pk, fr);
    detail::sp_outward(T, par, pc, tt, bb, fr);
    da = bb + std::min(tt, c.w - tt + pn.D);
    db = bb + std::min(c.w - tt, tt + pn.D);
    ni = par;
    ci = pc;
  }
  fr.finish();
  return fr;
}

/// Distance-only variant of the same walk.
inline Length farthest_distance_sp(const AbacusTree& T, PointOnEdge q) {
  return farthest_points_sp(T, q).distance;
}

}  // namespace spfar

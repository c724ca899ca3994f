#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "spfar/network.hpp"
#include "spfar/parallel_path.hpp"
#include "spfar/pl.hpp"
#include "spfar/probes.hpp"

// Farthest-point structure for bead-chain networks: a main cycle C with
// vertex-disjoint arcs attached along it.  Each arc alpha_i connects two
// distinct cycle vertices a_i, b_i and spans the cycle portion beta_i
// (going forward from a_i to b_i); gamma_i is the rest of the cycle.

namespace spfar {

class InvalidBeadChain : public BuildError {
 public:
  using BuildError::BuildError;
};

/// Internal-consistency failure: a valid bead chain admits at most one
/// overlong arc (two disjoint spans cannot both exceed half the cycle).
class TwoOverlongArcs : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct BCCycle {
  std::vector<VertexId> verts;  // in cycle order, verts[0] is the origin
  std::vector<EdgeId> edges;    // edges[k] joins verts[k] and verts[k+1 mod m]
  std::vector<Length> pref;     // position of verts[k] from the origin
  Length circ = 0;
};

struct BCArc {
  VertexId a = -1, b = -1;
  std::vector<VertexId> verts;  // a ... b along the arc
  std::vector<EdgeId> edges;
  std::vector<Length> pref;     // arc length of verts[k] from a
  Length walpha = 0;            // arc length
  Length wbeta = 0;             // spanned cycle portion, a forward to b
  Length wgamma = 0;            // remaining cycle portion
  Length apos = 0, bpos = 0;    // cycle positions of the endpoints
  bool overlong = false;        // wbeta > wgamma
};

/// Arcs that are farthest from some cycle point, in envelope (cycle) order.
struct RelevantArcList {
  std::vector<int> arcs;
};

struct BeadChainStructure {
  Network net;
  BCCycle cycle;
  std::vector<BCArc> arcs;
  int overlong = -1;  // arc id or -1

  // Envelope of the farthest-into-arc distances of the non-overlong arcs,
  // in doubled cycle coordinates on [0, 2*circ).
  CyclicEnvelope H;
  CyclicEnvelope Hp;  // partial envelope (extended tents only)
  RelevantArcList relevant;
  std::vector<int> rel_idx;  // per H segment: index into relevant.arcs
  long long build_steps = 0;

  // Upper envelope plus second level over the same functions, unwrapped on
  // [0, 2*circ]; answers max-excluding-one queries exactly.
  bool has_levels = false;
  TwoLevels levels;

  // Overlong arc support: parallel-path structure over alpha union C on a
  // remapped sub-network.
  std::optional<ParallelPathStructure> over_pp;
  std::vector<EdgeId> sub_to_full;
  std::vector<EdgeId> full_to_sub;

  // Edge locator: kind 0 = cycle edge, kind 1 = arc edge.
  std::vector<int> edge_kind;
  std::vector<int> edge_arc;
  std::vector<int> edge_sub;  // index within cycle.edges / arc edges
};

namespace detail {

inline Length bc_mod(Length x, Length c) {
  Length m = x % c;
  return m < 0 ? m + c : m;
}

inline Length bc_dist(Length x, Length y, Length c) {
  Length m = bc_mod(x - y, c);
  return std::min(m, c - m);
}

/// Largest k with pref[k] <= x (probed bisection); pref is increasing.
inline int locate_pref(const std::vector<Length>& pref, Length x) {
  int lo = 0, hi = static_cast<int>(pref.size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    probe();
    if (pref[mid] <= x)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

inline PointOnEdge oriented_point(const Network& net, EdgeId e, VertexId from,
                                  Length off) {
  const Edge& ed = net.edge(e);
  return canonicalize(net, {e, ed.u == from ? off : ed.w - off});
}

}  // namespace detail

/// Point at the given position along the cycle (any representative).
inline PointOnEdge cycle_point(const BeadChainStructure& ch, Length pos) {
  pos = detail::bc_mod(pos, ch.cycle.circ);
  int k = detail::locate_pref(ch.cycle.pref, pos);
  return detail::oriented_point(ch.net, ch.cycle.edges[k], ch.cycle.verts[k],
                                pos - ch.cycle.pref[k]);
}

/// Point at arc-length `off` from a_i along arc i.
inline PointOnEdge arc_point(const BeadChainStructure& ch, int i, Length off) {
  const BCArc& a = ch.arcs[i];
  int k = detail::locate_pref(a.pref, off);
  if (k == static_cast<int>(a.edges.size())) --k;  // off == walpha
  return detail::oriented_point(ch.net, a.edges[k], a.verts[k],
                                off - a.pref[k]);
}

/// The farthest-into-arc distance seen from the cycle as a formal shape in
/// doubled coordinates: low plateau w_beta + w_alpha on [a, b], high plateau
/// w_gamma + w_alpha on the antipodal interval.  For an overlong arc the
/// formal high plateau drops below the low one; such shapes are kept out of
/// the envelope and evaluated pointwise instead.
inline ArcDistanceShape arc_distance(const BeadChainStructure& ch, int i) {
  const BCArc& a = ch.arcs[i];
  const Length c2 = 2 * ch.cycle.circ;
  ArcDistanceShape s;
  s.owner = i;
  s.a = detail::bc_mod(2 * a.apos, c2);
  s.b = detail::bc_mod(2 * a.bpos, c2);
  s.bar_a = detail::bc_mod(2 * a.bpos + a.wgamma - a.wbeta, c2);
  s.bar_b = detail::bc_mod(s.bar_a + 2 * a.wbeta, c2);
  s.low = a.wbeta + a.walpha;
  s.high = a.wgamma + a.walpha;
  return s;
}

namespace detail {

/// Doubled farthest-into-arc value from doubled cycle position x2 via the
/// closed form (d(x,a) + d(x,b) + w_alpha) using cycle distances.  Valid for
/// every arc, overlong included.
inline Length arc_value2(const BeadChainStructure& ch, int i, Length x2) {
  const BCArc& a = ch.arcs[i];
  const Length c2 = 2 * ch.cycle.circ;
  Length da2 = bc_dist(x2, 2 * a.apos, c2);
  Length db2 = bc_dist(x2, 2 * a.bpos, c2);
  return (da2 + db2) / 2 + a.walpha;
}

/// Farthest point into arc i given the entry distances from the query to
/// a_i and b_i (any common additive shift cancels).
inline PointOnEdge arc_peak_point(const BeadChainStructure& ch, int i,
                                  Length da, Length db) {
  return arc_point(ch, i, (ch.arcs[i].walpha + db - da) / 2);
}

inline PLFunction unwrap_shape(const ArcDistanceShape& s, Length c2) {
  auto value_at = [&](Length x) {
    Length da = bc_dist(x, s.a, c2);
    Length db = bc_dist(x, s.b, c2);
    // low + (da + db - dist(a,b)) / 2 rewritten via the anchors.
    return (da + db) / 2 + s.low - bc_mod(s.b - s.a, c2) / 2;
  };
  std::vector<Length> xs = {0, c2, bc_mod(s.a, c2), bc_mod(s.b, c2),
                            bc_mod(s.bar_a, c2), bc_mod(s.bar_b, c2)};
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.back() != c2) xs.push_back(c2);
  PLFunction f;
  f.owner = s.owner;
  f.xs = xs;
  for (Length x : xs) f.vs.push_back(value_at(x));
  return f;
}

}  // namespace detail

inline std::optional<int> detect_overlong(const BeadChainStructure& ch) {
  return ch.overlong >= 0 ? std::optional<int>(ch.overlong) : std::nullopt;
}

inline BeadChainStructure build_bead_chain(
    const Network& net, const std::vector<VertexId>& cycle,
    const std::vector<std::pair<VertexId, VertexId>>& arcs) {
  BeadChainStructure ch{net};
  const int m = static_cast<int>(cycle.size());
  if (m < 3) throw InvalidBeadChain("cycle needs at least three vertices");
  std::vector<int> cyc_idx(net.vertex_count(), -1);
  for (int k = 0; k < m; ++k) {
    VertexId v = cycle[k];
    if (v < 0 || v >= net.vertex_count() || cyc_idx[v] >= 0)
      throw InvalidBeadChain("cycle vertices must be distinct");
    cyc_idx[v] = k;
  }
  std::vector<char> used(net.edge_count(), 0);
  ch.cycle.verts = cycle;
  ch.cycle.pref.resize(m);
  for (int k = 0; k < m; ++k) {
    EdgeId e = net.find_edge(cycle[k], cycle[(k + 1) % m]);
    if (e < 0) throw InvalidBeadChain("missing cycle edge");
    ch.cycle.edges.push_back(e);
    used[e] = 1;
    ch.cycle.pref[k] = ch.cycle.circ;
    ch.cycle.circ += net.edge(e).w;
  }

  // Trace each arc from its attachment pair through degree-two interiors.
  for (auto [av, bv] : arcs) {
    if (av < 0 || av >= net.vertex_count() || bv < 0 ||
        bv >= net.vertex_count() || cyc_idx[av] < 0 || cyc_idx[bv] < 0)
      throw InvalidBeadChain("arc endpoints must be cycle vertices");
    if (av == bv)
      throw InvalidBeadChain("arc endpoints must be distinct");
    bool found = false;
    for (EdgeId start : net.incident(av)) {
      if (used[start]) continue;
      BCArc arc;
      arc.a = av;
      arc.b = bv;
      arc.verts = {av};
      arc.pref = {0};
      VertexId cur = net.edge(start).other(av);
      EdgeId ce = start;
      bool ok = true;
      while (true) {
        arc.edges.push_back(ce);
        arc.pref.push_back(arc.pref.back() + net.edge(ce).w);
        arc.verts.push_back(cur);
        if (cyc_idx[cur] >= 0) break;
        if (net.incident(cur).size() != 2) {
          ok = false;
          break;
        }
        EdgeId nxt = net.incident(cur)[0] == ce ? net.incident(cur)[1]
                                                : net.incident(cur)[0];
        cur = net.edge(nxt).other(cur);
        ce = nxt;
      }
      if (!ok || arc.verts.back() != bv) continue;
      arc.walpha = arc.pref.back();
      arc.apos = ch.cycle.pref[cyc_idx[av]];
      arc.bpos = ch.cycle.pref[cyc_idx[bv]];
      arc.wbeta = detail::bc_mod(arc.bpos - arc.apos, ch.cycle.circ);
      arc.wgamma = ch.cycle.circ - arc.wbeta;
      if (arc.wbeta > arc.walpha)
        throw InvalidBeadChain("arc shorter than its spanned cycle portion");
      arc.overlong = arc.wbeta > arc.wgamma;
      for (EdgeId e : arc.edges) used[e] = 1;
      ch.arcs.push_back(std::move(arc));
      found = true;
      break;
    }
    if (!found) throw InvalidBeadChain("arc path not found");
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e)
    if (!used[e]) throw InvalidBeadChain("edge outside cycle and arcs");

  // Spanned intervals must be internally disjoint.
  {
    std::vector<std::pair<Length, Length>> iv;
    for (const BCArc& a : ch.arcs) iv.push_back({a.apos, a.apos + a.wbeta});
    std::sort(iv.begin(), iv.end());
    for (std::size_t k = 0; k + 1 < iv.size(); ++k)
      if (iv[k].second > iv[k + 1].first)
        throw InvalidBeadChain("arc spans overlap");
    if (iv.size() > 1 && iv.back().second > iv.front().first + ch.cycle.circ)
      throw InvalidBeadChain("arc spans overlap");
  }

  for (int i = 0; i < static_cast<int>(ch.arcs.size()); ++i)
    if (ch.arcs[i].overlong) {
      if (ch.overlong >= 0)
        throw TwoOverlongArcs("two overlong arcs in one bead chain");
      ch.overlong = i;
    }

  // Envelope over the non-overlong arcs, sorted by high-plateau position.
  const Length c2 = 2 * ch.cycle.circ;
  std::vector<ArcDistanceShape> shapes;
  for (int i = 0; i < static_cast<int>(ch.arcs.size()); ++i)
    if (i != ch.overlong) shapes.push_back(arc_distance(ch, i));
  std::sort(shapes.begin(), shapes.end(),
            [](const ArcDistanceShape& x, const ArcDistanceShape& y) {
              return x.bar_a < y.bar_a;
            });
  if (!shapes.empty()) {
    TwoPassResult tp = envelope_two_pass(c2, shapes);
    ch.H = std::move(tp.H);
    ch.Hp = std::move(tp.Hp);
    ch.build_steps = tp.steps;
    // Relevant arcs: distinct owner runs of H in cycle order.
    ch.rel_idx.resize(ch.H.seg_count());
    for (int s = 0; s < ch.H.seg_count(); ++s) {
      if (s == 0 || ch.H.owner[s] != ch.H.owner[s - 1])
        ch.relevant.arcs.push_back(ch.H.owner[s]);
      ch.rel_idx[s] = static_cast<int>(ch.relevant.arcs.size()) - 1;
    }
    if (ch.relevant.arcs.size() > 1 &&
        ch.relevant.arcs.front() == ch.relevant.arcs.back()) {
      ch.relevant.arcs.pop_back();
      for (int& r : ch.rel_idx)
        if (r == static_cast<int>(ch.relevant.arcs.size())) r = 0;
    }
  }
  if (shapes.size() >= 2) {
    std::vector<PLFunction> fs;
    for (const ArcDistanceShape& s : shapes)
      fs.push_back(detail::unwrap_shape(s, c2));
    ch.levels = envelope_and_second_level(fs);
    ch.has_levels = true;
  }

  // Parallel-path structure over alpha union C for the overlong arc.
  if (ch.overlong >= 0) {
    const BCArc& oa = ch.arcs[ch.overlong];
    std::vector<VertexId> vmap(net.vertex_count(), -1);
    VertexId nsub = 0;
    for (VertexId v : ch.cycle.verts) vmap[v] = nsub++;
    for (std::size_t k = 1; k + 1 < oa.verts.size(); ++k)
      vmap[oa.verts[k]] = nsub++;
    std::vector<Edge> sub_edges;
    ch.full_to_sub.assign(net.edge_count(), -1);
    auto add_sub = [&](EdgeId e) {
      const Edge& ed = net.edge(e);
      ch.full_to_sub[e] = static_cast<EdgeId>(sub_edges.size());
      ch.sub_to_full.push_back(e);
      sub_edges.push_back({vmap[ed.u], vmap[ed.v], ed.w});
    };
    for (EdgeId e : ch.cycle.edges) add_sub(e);
    for (EdgeId e : oa.edges) add_sub(e);
    Network sub(nsub, std::move(sub_edges));
    ch.over_pp = build_parallel_path(sub, vmap[oa.a], vmap[oa.b]);
  }

  // Edge locator.
  ch.edge_kind.assign(net.edge_count(), 0);
  ch.edge_arc.assign(net.edge_count(), -1);
  ch.edge_sub.assign(net.edge_count(), -1);
  for (int k = 0; k < m; ++k) ch.edge_sub[ch.cycle.edges[k]] = k;
  for (int i = 0; i < static_cast<int>(ch.arcs.size()); ++i)
    for (std::size_t k = 0; k < ch.arcs[i].edges.size(); ++k) {
      EdgeId e = ch.arcs[i].edges[k];
      ch.edge_kind[e] = 1;
      ch.edge_arc[e] = i;
      ch.edge_sub[e] = static_cast<int>(k);
    }
  return ch;
}

namespace detail {

/// Farthest distance into the non-overlong arcs from doubled cycle position
/// x2, excluding arc `excluded` (-1 for none).  Returns doubled value and
/// the attaining arc ids; value is kNegInf when no arc qualifies.
inline std::pair<Length, std::vector<int>> arcs_from_cycle(
    const BeadChainStructure& ch, Length x2, int excluded) {
  int s = static_cast<int>(ch.arcs.size()) - (ch.overlong >= 0 ? 1 : 0);
  if (s == 0) return {kNegInf, {}};
  if (s == 1) {
    int only = -1;
    for (int i = 0; i < static_cast<int>(ch.arcs.size()); ++i)
      if (i != ch.overlong) only = i;
    if (only == excluded) return {kNegInf, {}};
    return {arc_value2(ch, only, x2), {only}};
  }
  x2 = bc_mod(x2, 2 * ch.cycle.circ);
  std::vector<int> ids;
  Length val;
  if (excluded < 0) {
    val = ch.levels.u1.value_at(x2);
    for (const EnvAtt& a : ch.levels.u1.attainers_at(x2)) ids.push_back(a.owner);
  } else {
    auto [v, atts] = eval_excluding(ch.levels.u1, ch.levels.u2, x2, excluded);
    val = v;
    for (const EnvAtt& a : atts) ids.push_back(a.owner);
  }
  return {val, std::move(ids)};
}

/// Adds the farthest points into the given arcs; x is the (projected) cycle
/// position of the query and `base` the uniform distance from the query to
/// that projection.
inline void add_arc_points(const BeadChainStructure& ch, FarthestResult& fr,
                           const std::vector<int>& ids, Length x, Length base) {
  for (int i : ids) {
    const BCArc& a = ch.arcs[i];
    Length da = bc_dist(x, a.apos, ch.cycle.circ);
    Length db = bc_dist(x, a.bpos, ch.cycle.circ);
    fr.add(base + (da + db + a.walpha) / 2, arc_peak_point(ch, i, da, db));
  }
}

/// Query in alpha union C through the parallel-path sub-structure, with the
/// answer mapped back to the full network.
inline FarthestResult over_pp_query(const BeadChainStructure& ch,
                                    PointOnEdge q) {
  PointOnEdge sq{ch.full_to_sub[q.edge], q.offset};
  FarthestResult sub = farthest_points_pp(*ch.over_pp, sq);
  FarthestResult fr;
  for (const PointOnEdge& p : sub.points)
    fr.add(sub.distance, canonicalize(ch.net, {ch.sub_to_full[p.edge], p.offset}));
  return fr;
}

}  // namespace detail

/// Farthest distance into the arcs from a cycle point, with every attaining
/// arc.  Plateau segments report their stored arcs; slope segments walk the
/// relevant-arc list in both directions until an arc stops being farthest.
/// Requires a chain without overlong arc (the caller treats it separately).
inline std::pair<Length, std::vector<int>> farthest_arc_query(
    const BeadChainStructure& ch, PointOnEdge q) {
  q = make_point(ch.net, q.edge, q.offset);
  if (ch.edge_kind[q.edge] != 0)
    throw InvalidQuery("farthest_arc_query needs a cycle point");
  if (ch.H.seg_count() == 0) return {-1, {}};
  int k = ch.edge_sub[q.edge];
  const Edge& ed = ch.net.edge(q.edge);
  Length off = ed.u == ch.cycle.verts[k] ? q.offset : ed.w - q.offset;
  Length x2 = detail::bc_mod(2 * (ch.cycle.pref[k] + off), 2 * ch.cycle.circ);

  int seg = ch.H.find_seg(x2);
  Length val = ch.H.value_on_seg(seg, x2);
  std::set<int> out;
  auto consider = [&](int arc) {
    if (detail::arc_value2(ch, arc, x2) == val) {
      out.insert(arc);
      return true;
    }
    return false;
  };
  out.insert(ch.H.owner[seg]);
  for (int c : ch.H.co[seg]) consider(c);
  if (x2 == ch.H.xs[seg]) {
    int prev = seg == 0 ? ch.H.seg_count() - 1 : seg - 1;
    consider(ch.H.owner[prev]);
    for (int c : ch.H.co[prev]) consider(c);
  }
  const int r = static_cast<int>(ch.relevant.arcs.size());
  for (int dir : {1, -1}) {
    int ri = ch.rel_idx[seg];
    for (int step = 1; step < r; ++step) {
      probe();
      int arc = ch.relevant.arcs[detail::bc_mod(ri + dir * step, r)];
      if (!consider(arc)) break;
    }
  }
  return {val / 2, {out.begin(), out.end()}};
}

/// Exact farthest-point query from anywhere on the bead chain.
inline FarthestResult farthest_points_bc(const BeadChainStructure& ch,
                                         PointOnEdge q) {
  q = make_point(ch.net, q.edge, q.offset);
  const Length C = ch.cycle.circ;
  FarthestResult fr;

  if (ch.edge_kind[q.edge] == 0) {
    // Query on the cycle.
    int k = ch.edge_sub[q.edge];
    const Edge& ed = ch.net.edge(q.edge);
    Length off = ed.u == ch.cycle.verts[k] ? q.offset : ed.w - q.offset;
    Length x = ch.cycle.pref[k] + off;
    if (ch.overlong >= 0)
      fr.merge(detail::over_pp_query(ch, q));  // covers cycle and alpha
    else
      fr.add(C / 2, cycle_point(ch, x + C / 2));
    auto [val2, ids] = detail::arcs_from_cycle(ch, 2 * x, -1);
    (void)val2;
    if (!ids.empty()) detail::add_arc_points(ch, fr, ids, x, 0);
    fr.finish();
    return fr;
  }

  const int i = ch.edge_arc[q.edge];
  const BCArc& a = ch.arcs[i];
  const Edge& ed = ch.net.edge(q.edge);
  int k = ch.edge_sub[q.edge];
  Length off = ed.u == a.verts[k] ? q.offset : ed.w - q.offset;
  Length o = a.pref[k] + off;  // arc length from a_i

  if (i == ch.overlong) {
    // Own arc and the whole cycle through the alpha-union-C structure.
    fr.merge(detail::over_pp_query(ch, q));
    // Remaining arcs: side cases route everything through one endpoint;
    // the middle case projects q onto beta with a uniform shift.
    if (static_cast<int>(ch.arcs.size()) > 1) {
      Length base, x;
      if (2 * o < a.walpha - a.wgamma) {
        base = o;
        x = a.apos;
      } else if (2 * o > a.walpha + a.wgamma) {
        base = a.walpha - o;
        x = a.bpos;
      } else {
        base = (a.walpha - a.wbeta) / 2;
        x = detail::bc_mod(a.apos + o - base, C);
      }
      auto [val2, ids] = detail::arcs_from_cycle(ch, 2 * x, -1);
      if (!ids.empty()) detail::add_arc_points(ch, fr, ids, x, base);
    }
    fr.finish();
    return fr;
  }

  // Query on a non-overlong arc: the farthest point within the cycle
  // alpha_i union beta_i is its antipode (distances there are preserved,
  // since beta is the shortest outside connection).
  const Length L = a.walpha + a.wbeta;
  {
    Length ap = detail::bc_mod(o + L / 2, L);
    PointOnEdge p = ap <= a.walpha
                        ? arc_point(ch, i, ap)
                        : cycle_point(ch, a.apos + (L - ap));
    fr.add(L / 2, p);
  }

  // Everything outside alpha_i union beta_i.
  Length base, x;
  bool middle = false;
  if (2 * o < a.walpha - a.wbeta) {
    base = o;  // left: all outside points are reached through a_i
    x = a.apos;
  } else if (2 * o > a.walpha + a.wbeta) {
    base = a.walpha - o;  // right: through b_i
    x = a.bpos;
  } else {
    base = (a.walpha - a.wbeta) / 2;  // middle: project onto beta_i
    x = detail::bc_mod(a.apos + o - base, C);
    middle = true;
  }
  // Farthest cycle point seen from the projection.
  Length anti = detail::bc_mod(x + C / 2, C);
  bool anti_in_beta = false;
  if (middle) {
    Length rel = detail::bc_mod(anti - a.apos, C);
    anti_in_beta = rel > 0 && rel < a.wbeta;  // shift identity fails there
  }
  if (!anti_in_beta) fr.add(base + C / 2, cycle_point(ch, anti));
  // Other non-overlong arcs (own arc excluded), then the overlong arc.
  auto [val2, ids] = detail::arcs_from_cycle(ch, 2 * x, i);
  if (!ids.empty()) detail::add_arc_points(ch, fr, ids, x, base);
  if (ch.overlong >= 0)
    detail::add_arc_points(ch, fr, {ch.overlong}, x, base);
  fr.finish();
  return fr;
}

}  // namespace spfar

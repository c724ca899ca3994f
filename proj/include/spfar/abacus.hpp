#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "spfar/bead_chain.hpp"
#include "spfar/network.hpp"
#include "spfar/parallel_path.hpp"
#include "spfar/pl.hpp"
#include "spfar/probes.hpp"

// Farthest-point structure for abacus networks: parallel paths P_1..P_p
// between terminals u, v with arcs attached to the paths.  Chain B_i is
// path P_i plus its arcs; its closure B_i' adds a virtual uv edge of weight
// d(u,v), which preserves all abacus distances restricted to B_i.

namespace spfar {

class InvalidAbacus : public BuildError {
 public:
  using BuildError::BuildError;
};

class SingleChain : public InvalidQuery {
 public:
  using InvalidQuery::InvalidQuery;
};

struct AbacusChainSpec {
  std::vector<VertexId> path;  // u ... v
  std::vector<std::pair<VertexId, VertexId>> arcs;  // attachment pairs, a
                                                    // before b along the path
};

struct AbacusArc {
  VertexId a = -1, b = -1;
  std::vector<VertexId> verts;  // a ... b
  std::vector<EdgeId> edges;
  std::vector<Length> pref;
  Length walpha = 0;
  Length pa = 0, pb = 0;  // attachment positions along the path
  Length wbeta = 0;       // pb - pa, the spanned sub-path
};

struct AbacusChain {
  std::vector<VertexId> verts;  // path u ... v
  std::vector<EdgeId> edges;
  std::vector<Length> pref;
  Length w = 0;
  std::vector<AbacusArc> arcs;
  int overlong = -1;  // arc index whose span exceeds the rest of B_i' cycle
  std::optional<BeadChainStructure> closure;  // B_i' (paths with >= 2 edges)
  Envelope env;  // chain envelope over the virtual-edge window (see below)
  FarthestResult from_u, from_v;  // farthest within B_i from the terminals
};

/// Farthest points outside the query's own chain.
struct OutwardAnswer {
  Length distance = -1;
  std::vector<PointOnEdge> points;
};

struct AbacusStructure {
  Network net;
  VertexId u = -1, v = -1;
  Length duv = 0;  // shortest path weight == d(u,v)
  Length wp = 0;   // longest path weight == virtual edge length
  std::vector<AbacusChain> chains;

  std::optional<ParallelPathStructure> pp;  // over the paths-only subnetwork
  std::vector<EdgeId> pp_to_full;

  // Global upper envelope and second level over the per-chain envelopes
  // (owner = chain id), on the middle window of the virtual edge.  The
  // envelopes live in coordinates x = 8*T for T on the virtual edge, so
  // that breakpoints of both envelope stages stay on the even grid.
  bool has_global = false;
  TwoLevels global;

  // Edge locator.
  std::vector<int> edge_chain;
  std::vector<int> edge_kind;  // 0 path, 1 arc
  std::vector<int> edge_arc;
  std::vector<int> edge_sub;
};

namespace detail {

inline PointOnEdge ab_path_point(const AbacusStructure& s, int i, Length pos) {
  const AbacusChain& c = s.chains[i];
  int k = locate_pref(c.pref, pos);
  if (k == static_cast<int>(c.edges.size())) --k;  // pos == w
  return oriented_point(s.net, c.edges[k], c.verts[k], pos - c.pref[k]);
}

inline PointOnEdge ab_arc_point(const AbacusStructure& s, int i, int k,
                                Length off) {
  const AbacusArc& a = s.chains[i].arcs[k];
  int e = locate_pref(a.pref, off);
  if (e == static_cast<int>(a.edges.size())) --e;
  return oriented_point(s.net, a.edges[e], a.verts[e], off - a.pref[e]);
}

inline Length chain_cycle(const AbacusStructure& s, int i) {
  return s.chains[i].w + s.duv;
}

// Distance from a point at path position t to the terminals, within the
// closure cycle (path + virtual edge).
inline Length du_at(const AbacusStructure& s, int i, Length t) {
  return std::min(t, s.chains[i].w - t + s.duv);
}
inline Length dv_at(const AbacusStructure& s, int i, Length t) {
  return std::min(s.chains[i].w - t, t + s.duv);
}

/// Farthest-into-arc candidates from projected cycle position x (shift
/// `base`), excluding arc index `exclude`.  Non-overlong arcs come from the
/// closure's envelope levels; the overlong arc is evaluated directly.
inline void inward_arcs(const AbacusStructure& s, int i, Length x, Length base,
                        int exclude, FarthestResult& fr) {
  const AbacusChain& c = s.chains[i];
  if (!c.closure) return;
  const Length C = chain_cycle(s, i);
  auto [val2, ids] = arcs_from_cycle(*c.closure, 2 * x, exclude);
  (void)val2;
  if (c.overlong >= 0 && c.overlong != exclude) ids.push_back(c.overlong);
  for (int k : ids) {
    const AbacusArc& a = c.arcs[k];
    Length da = bc_dist(x, a.pa, C);
    Length db = bc_dist(x, a.pb, C);
    fr.add(base + (da + db + a.walpha) / 2,
           ab_arc_point(s, i, k, (a.walpha + db - da) / 2));
  }
}

/// Farthest candidates on the path portion, seen from projected cycle
/// position x with shift `base`.  The unimodal cycle distance restricted to
/// the path attains its maximum at the antipode (when it lies on the path)
/// or at the terminals.  `fb_lo`/`fb_hi` bound an open interval where the
/// projection identity does not hold (the query arc's own span).
inline void inward_cycle(const AbacusStructure& s, int i, Length x,
                         Length base, Length fb_lo, Length fb_hi,
                         FarthestResult& fr) {
  const AbacusChain& c = s.chains[i];
  const Length C = chain_cycle(s, i);
  Length anti = bc_mod(x + C / 2, C);
  if (anti <= c.w && !(anti > fb_lo && anti < fb_hi))
    fr.add(base + C / 2, ab_path_point(s, i, anti));
  fr.add(base + bc_dist(x, 0, C), vertex_point(s.net, s.u));
  fr.add(base + bc_dist(x, c.w, C), vertex_point(s.net, s.v));
}

inline FarthestResult inward_from_path(const AbacusStructure& s, int i,
                                       Length t) {
  FarthestResult fr;
  inward_cycle(s, i, t, 0, 1, 0, fr);
  inward_arcs(s, i, t, 0, -1, fr);
  fr.finish();
  return fr;
}

inline FarthestResult inward_from_arc(const AbacusStructure& s, int i, int k,
                                      Length o) {
  const AbacusChain& c = s.chains[i];
  const AbacusArc& a = c.arcs[k];
  const Length C = chain_cycle(s, i);
  const Length wgam = C - a.wbeta;
  FarthestResult fr;
  if (k != c.overlong) {
    // Antipode of the little cycle alpha union beta covers the own arc and
    // the spanned sub-path exactly.
    const Length L = a.walpha + a.wbeta;
    Length ap = bc_mod(o + L / 2, L);
    fr.add(L / 2, ap <= a.walpha
                      ? ab_arc_point(s, i, k, ap)
                      : ab_path_point(s, i, a.pb - (ap - a.walpha)));
    Length base, x;
    bool middle = false;
    if (2 * o < a.walpha - a.wbeta) {
      base = o;
      x = a.pa;
    } else if (2 * o > a.walpha + a.wbeta) {
      base = a.walpha - o;
      x = a.pb;
    } else {
      base = (a.walpha - a.wbeta) / 2;
      x = bc_mod(a.pa + o - base, C);
      middle = true;
    }
    inward_cycle(s, i, x, base, middle ? a.pa : 1, middle ? a.pb : 0, fr);
    inward_arcs(s, i, x, base, k, fr);
    fr.finish();
    return fr;
  }

  // Overlong arc: the short outside connection runs through the virtual
  // edge, so candidates are assembled from the entry distances directly.
  const Length wshort = wgam;  // wbeta > wgam for the overlong arc
  Length da = std::min(o, a.walpha - o + wshort);
  Length db = std::min(a.walpha - o, o + wshort);
  {
    const Length L = a.walpha + wshort;
    Length ap = bc_mod(o + L / 2, L);
    if (ap <= a.walpha) fr.add(L / 2, ab_arc_point(s, i, k, ap));
  }
  // Two-source peaks on the cycle, kept only when they land on the path.
  fr.add((da + db + a.wbeta) / 2,
         ab_path_point(s, i, a.pa + (db - da + a.wbeta) / 2));
  {
    Length g = (da - db + wgam) / 2;  // along gamma from b
    if (g <= c.w - a.pb)
      fr.add((da + db + wgam) / 2, ab_path_point(s, i, a.pb + g));
    else if (g >= c.w - a.pb + s.duv)
      fr.add((da + db + wgam) / 2,
             ab_path_point(s, i, g - (c.w - a.pb) - s.duv));
  }
  fr.add(std::min(da + du_at(s, i, a.pa), db + du_at(s, i, a.pb)),
         vertex_point(s.net, s.u));
  fr.add(std::min(da + dv_at(s, i, a.pa), db + dv_at(s, i, a.pb)),
         vertex_point(s.net, s.v));
  // Other arcs via the side/middle projection.
  Length base, x;
  if (2 * o < a.walpha - wgam) {
    base = o;
    x = a.pa;
  } else if (2 * o > a.walpha + wgam) {
    base = a.walpha - o;
    x = a.pb;
  } else {
    base = (a.walpha - a.wbeta) / 2;
    x = bc_mod(a.pa + o - base, C);
  }
  inward_arcs(s, i, x, base, k, fr);
  fr.finish();
  return fr;
}

struct QLoc {
  int chain = -1;
  bool on_arc = false;
  int arc = -1;
  Length pos = 0;  // path position t or arc offset o
};

inline QLoc locate_ab(const AbacusStructure& s, PointOnEdge q) {
  QLoc l;
  l.chain = s.edge_chain[q.edge];
  const Edge& ed = s.net.edge(q.edge);
  int k = s.edge_sub[q.edge];
  if (s.edge_kind[q.edge] == 0) {
    const AbacusChain& c = s.chains[l.chain];
    l.pos = c.pref[k] + (ed.u == c.verts[k] ? q.offset : ed.w - q.offset);
  } else {
    l.on_arc = true;
    l.arc = s.edge_arc[q.edge];
    const AbacusArc& a = s.chains[l.chain].arcs[l.arc];
    l.pos = a.pref[k] + (ed.u == a.verts[k] ? q.offset : ed.w - q.offset);
  }
  return l;
}

/// Path representative (t, base) of a query: distances to every point
/// outside the query's own arc satisfy d(q,c) = base + d(path point t, c).
inline std::pair<Length, Length> path_rep(const AbacusStructure& s,
                                          const QLoc& l) {
  if (!l.on_arc) return {l.pos, 0};
  const AbacusChain& c = s.chains[l.chain];
  const AbacusArc& a = c.arcs[l.arc];
  const Length C = chain_cycle(s, l.chain);
  const Length wshort = std::min(a.wbeta, C - a.wbeta);
  Length o = l.pos;
  if (2 * o <= a.walpha - wshort) return {a.pa, o};
  if (2 * o >= a.walpha + wshort) return {a.pb, a.walpha - o};
  return {a.pa + o - (a.walpha - a.wbeta) / 2, (a.walpha - a.wbeta) / 2};
}

// Doubled farthest-into-arc value in the chain-j-union-virtual-edge cycle,
// seen from the virtual-edge point at doubled position T2 (from u).
inline Length virt_arc_value2(const AbacusStructure& s, int j, int k,
                              Length T2) {
  const AbacusChain& c = s.chains[j];
  const AbacusArc& a = c.arcs[k];
  const Length C2 = 2 * (c.w + s.wp);
  Length pos2 = bc_mod(2 * c.w + 2 * s.wp - T2, C2);
  Length da2 = bc_dist(pos2, 2 * a.pa, C2);
  Length db2 = bc_dist(pos2, 2 * a.pb, C2);
  return (da2 + db2) / 2 + a.walpha;
}

}  // namespace detail

inline AbacusStructure build_abacus(const Network& net, VertexId u, VertexId v,
                                    const std::vector<AbacusChainSpec>& specs) {
  AbacusStructure s{net};
  s.u = u;
  s.v = v;
  if (u < 0 || u >= net.vertex_count() || v < 0 || v >= net.vertex_count() ||
      u == v)
    throw InvalidAbacus("bad terminal pair");
  if (specs.empty()) throw InvalidAbacus("no chains");

  std::vector<char> used(net.edge_count(), 0);
  std::vector<int> owner_chain(net.vertex_count(), -1);
  s.edge_chain.assign(net.edge_count(), -1);
  s.edge_kind.assign(net.edge_count(), 0);
  s.edge_arc.assign(net.edge_count(), -1);
  s.edge_sub.assign(net.edge_count(), -1);

  for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
    const AbacusChainSpec& sp = specs[i];
    if (sp.path.size() < 2 || sp.path.front() != u || sp.path.back() != v)
      throw InvalidAbacus("chain path must run from u to v");
    AbacusChain c;
    c.verts = sp.path;
    c.pref.resize(sp.path.size());
    std::vector<int> idx_on_path(net.vertex_count(), -1);
    for (std::size_t k = 0; k < sp.path.size(); ++k) {
      VertexId x = sp.path[k];
      if (x != u && x != v) {
        if (owner_chain[x] >= 0) throw InvalidAbacus("paths must be disjoint");
        owner_chain[x] = i;
      }
      if (idx_on_path[x] >= 0) throw InvalidAbacus("path revisits a vertex");
      idx_on_path[x] = static_cast<int>(k);
      c.pref[k] = c.w;
      if (k + 1 < sp.path.size()) {
        EdgeId e = net.find_edge(sp.path[k], sp.path[k + 1]);
        if (e < 0 || used[e]) throw InvalidAbacus("missing path edge");
        used[e] = 1;
        c.edges.push_back(e);
        s.edge_chain[e] = i;
        s.edge_sub[e] = static_cast<int>(k);
        c.w += net.edge(e).w;
      }
    }
    c.pref.back() = c.w;

    for (auto [av, bv] : sp.arcs) {
      if (av < 0 || av >= net.vertex_count() || bv < 0 ||
          bv >= net.vertex_count() || idx_on_path[av] < 0 ||
          idx_on_path[bv] < 0 || idx_on_path[av] >= idx_on_path[bv])
        throw InvalidAbacus("arc endpoints must appear in order on the path");
      bool found = false;
      for (EdgeId start : net.incident(av)) {
        if (used[start]) continue;
        AbacusArc arc;
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
          if (idx_on_path[cur] >= 0 || cur == u || cur == v ||
              owner_chain[cur] >= 0)
            break;
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
        arc.pa = c.pref[idx_on_path[av]];
        arc.pb = c.pref[idx_on_path[bv]];
        arc.wbeta = arc.pb - arc.pa;
        if (arc.wbeta > arc.walpha)
          throw InvalidAbacus("arc shorter than its spanned sub-path");
        int ai = static_cast<int>(c.arcs.size());
        for (std::size_t k = 0; k < arc.edges.size(); ++k) {
          EdgeId e = arc.edges[k];
          used[e] = 1;
          s.edge_chain[e] = i;
          s.edge_kind[e] = 1;
          s.edge_arc[e] = ai;
          s.edge_sub[e] = static_cast<int>(k);
        }
        for (std::size_t k = 1; k + 1 < arc.verts.size(); ++k)
          owner_chain[arc.verts[k]] = i;
        c.arcs.push_back(std::move(arc));
        found = true;
        break;
      }
      if (!found) throw InvalidAbacus("arc path not found");
    }
    s.chains.push_back(std::move(c));
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e)
    if (!used[e]) throw InvalidAbacus("edge outside every chain");

  s.duv = s.chains[0].w;
  s.wp = s.chains[0].w;
  for (const AbacusChain& c : s.chains) {
    s.duv = std::min(s.duv, c.w);
    s.wp = std::max(s.wp, c.w);
  }

  // Parallel-path structure over the paths-only subnetwork.
  {
    std::vector<VertexId> vmap(net.vertex_count(), -1);
    VertexId nsub = 0;
    vmap[u] = nsub++;
    vmap[v] = nsub++;
    std::vector<Edge> es;
    for (const AbacusChain& c : s.chains) {
      for (VertexId x : c.verts)
        if (vmap[x] < 0) vmap[x] = nsub++;
      for (EdgeId e : c.edges) {
        const Edge& ed = net.edge(e);
        s.pp_to_full.push_back(e);
        es.push_back({vmap[ed.u], vmap[ed.v], ed.w});
      }
    }
    Network sub(nsub, std::move(es));
    try {
      s.pp = build_parallel_path(sub, vmap[u], vmap[v]);
    } catch (const NotParallelPath& e) {
      throw InvalidAbacus(e.what());
    }
  }

  // Closures B_i' for chains whose path has at least two edges.
  for (int i = 0; i < static_cast<int>(s.chains.size()); ++i) {
    AbacusChain& c = s.chains[i];
    if (c.edges.size() < 2 && c.arcs.empty()) continue;  // trivial chain
    std::vector<VertexId> vmap(net.vertex_count(), -1);
    VertexId nsub = 0;
    for (VertexId x : c.verts) vmap[x] = nsub++;
    for (const AbacusArc& a : c.arcs)
      for (std::size_t k = 1; k + 1 < a.verts.size(); ++k)
        vmap[a.verts[k]] = nsub++;
    std::vector<Edge> es;
    auto add_edge = [&](EdgeId e) {
      const Edge& ed = net.edge(e);
      es.push_back({vmap[ed.u], vmap[ed.v], ed.w});
    };
    for (EdgeId e : c.edges) add_edge(e);
    for (const AbacusArc& a : c.arcs)
      for (EdgeId e : a.edges) add_edge(e);
    es.push_back({vmap[v], vmap[u], s.duv});  // virtual closure edge
    std::vector<VertexId> cyc;
    for (VertexId x : c.verts) cyc.push_back(vmap[x]);
    std::vector<std::pair<VertexId, VertexId>> arc_pairs;
    for (const AbacusArc& a : c.arcs)
      arc_pairs.push_back({vmap[a.a], vmap[a.b]});
    try {
      Network sub(nsub, std::move(es));
      c.closure = build_bead_chain(sub, cyc, arc_pairs);
    } catch (const BuildError& e) {
      throw InvalidAbacus(e.what());
    }
    c.overlong = c.closure->overlong;
  }

  // Side-case lists: farthest within each chain from the terminals.
  for (int i = 0; i < static_cast<int>(s.chains.size()); ++i) {
    s.chains[i].from_u = detail::inward_from_path(s, i, 0);
    s.chains[i].from_v = detail::inward_from_path(s, i, s.chains[i].w);
  }

  // Per-chain envelopes over the middle window of the virtual edge, then
  // the global envelope and second level over them.  Coordinates x = 8*T
  // keep the breakpoints of both envelope stages on the even grid.
  if (s.chains.size() >= 2) {
    const Length W0 = 4 * (s.wp - s.duv), W1 = 4 * (s.wp + s.duv);
    std::vector<PLFunction> chain_fs;
    for (int j = 0; j < static_cast<int>(s.chains.size()); ++j) {
      AbacusChain& c = s.chains[j];
      std::vector<PLFunction> fs;
      for (int k = 0; k < static_cast<int>(c.arcs.size()); ++k) {
        const AbacusArc& a = c.arcs[k];
        const Length C = c.w + s.wp;
        // Bends of the arc's distance shape, mapped to virtual-edge coords.
        std::vector<Length> xs = {W0, W1};
        Length wg = C - a.wbeta;
        Length anchors[4] = {a.pa, a.pb, a.pb + (wg - a.wbeta) / 2,
                             a.pb + (wg + a.wbeta) / 2};
        for (Length pos : anchors) {
          Length cut = 8 * (c.w + s.wp - detail::bc_mod(pos, C));
          if (cut > W0 && cut < W1) xs.push_back(cut);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        PLFunction f;
        f.owner = k;
        f.xs = xs;
        for (Length x : xs)
          f.vs.push_back(4 * detail::virt_arc_value2(s, j, k, x / 4));
        fs.push_back(std::move(f));
      }
      // The path itself as a degenerate arc: its moving peak stays interior
      // throughout the window, giving a constant (w_p + w_j) / 2.
      PLFunction pf;
      pf.owner = static_cast<int>(c.arcs.size());
      pf.xs = {W0, W1};
      pf.vs = {4 * (s.wp + c.w), 4 * (s.wp + c.w)};
      fs.push_back(std::move(pf));
      c.env = upper_envelope(fs);
      PLFunction g;
      g.owner = j;
      g.xs = c.env.xs;
      g.vs = c.env.vs;
      chain_fs.push_back(std::move(g));
    }
    s.global = envelope_and_second_level(chain_fs);
    s.has_global = true;
  }
  return s;
}

/// Farthest points from q among the points of q's own chain.
inline FarthestResult inward_query(const AbacusStructure& s, PointOnEdge q) {
  q = make_point(s.net, q.edge, q.offset);
  detail::QLoc l = detail::locate_ab(s, q);
  return l.on_arc ? detail::inward_from_arc(s, l.chain, l.arc, l.pos)
                  : detail::inward_from_path(s, l.chain, l.pos);
}

/// Farthest points from q among the points of the other chains.
inline OutwardAnswer outward_query(const AbacusStructure& s, PointOnEdge q) {
  if (s.chains.size() < 2)
    throw SingleChain("outward query needs at least two chains");
  q = make_point(s.net, q.edge, q.offset);
  detail::QLoc l = detail::locate_ab(s, q);
  const int i = l.chain;
  auto [t, base] = detail::path_rep(s, l);
  Length du = base + detail::du_at(s, i, t);
  Length dv = base + detail::dv_at(s, i, t);

  FarthestResult fr;
  auto side_case = [&](Length d0, bool from_u_side) {
    Length best = -1;
    for (int j = 0; j < static_cast<int>(s.chains.size()); ++j) {
      if (j == i) continue;
      const FarthestResult& lj =
          from_u_side ? s.chains[j].from_u : s.chains[j].from_v;
      best = std::max(best, lj.distance);
    }
    for (int j = 0; j < static_cast<int>(s.chains.size()); ++j) {
      if (j == i) continue;
      const FarthestResult& lj =
          from_u_side ? s.chains[j].from_u : s.chains[j].from_v;
      if (lj.distance != best) continue;
      for (const PointOnEdge& p : lj.points) fr.add(d0 + best, p);
    }
  };
  if (du + s.duv <= dv) {
    side_case(du, true);
  } else if (dv + s.duv <= du) {
    side_case(dv, false);
  } else {
    // Middle case: elongate P_i onto the virtual edge.
    const Length lambda = (s.wp - s.chains[i].w) / 2;
    const Length T = t + lambda;
    const Length x8 = 8 * T;
    auto [val8, atts] = eval_excluding(s.global.u1, s.global.u2, x8, i);
    Length dist = base - lambda + val8 / 8;
    for (const EnvAtt& ca : atts) {
      int j = ca.owner;
      const AbacusChain& c = s.chains[j];
      for (const EnvAtt& fa : c.env.attainers_at(x8)) {
        if (fa.owner == static_cast<int>(c.arcs.size())) {
          // Degenerate path arc: moving peak on P_j.
          fr.add(dist, detail::ab_path_point(s, j, (c.w + s.wp) / 2 - T));
        } else {
          const AbacusArc& a = c.arcs[fa.owner];
          Length dA = std::min(T + a.pa, s.wp - T + c.w - a.pa);
          Length dB = std::min(T + a.pb, s.wp - T + c.w - a.pb);
          fr.add(dist,
                 detail::ab_arc_point(s, j, fa.owner, (a.walpha + dB - dA) / 2));
        }
      }
    }
  }
  fr.finish();
  return {fr.distance, std::move(fr.points)};
}

/// Exact farthest-point query: max-merge of the inward and outward parts.
inline FarthestResult farthest_points_abacus(const AbacusStructure& s,
                                             PointOnEdge q) {
  FarthestResult fr = inward_query(s, q);
  if (s.chains.size() >= 2) {
    OutwardAnswer out = outward_query(s, q);
    FarthestResult of;
    for (const PointOnEdge& p : out.points) of.add(out.distance, p);
    fr.merge(of);
  }
  fr.finish();
  return fr;
}

}  // namespace spfar

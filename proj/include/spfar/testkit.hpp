#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "spfar/abacus.hpp"
#include "spfar/bead_chain.hpp"
#include "spfar/oracle.hpp"
#include "spfar/parallel_path.hpp"
#include "spfar/sp.hpp"

namespace spfar {

class BudgetExceeded : public BuildError {
 public:
  using BuildError::BuildError;
};

enum class NetClass { ParallelPath, BeadChain, Abacus, SeriesParallel };

/// Seeded recipe for a random network of one of the four classes.  Identical
/// specs produce bit-identical networks.
struct GenSpec {
  std::uint64_t seed = 0;
  NetClass cls = NetClass::SeriesParallel;
  int s = 4;  // serialism knob: series operations / internal vertices
  int p = 2;  // parallelism knob: parallel operations / branches
  Length wmin = kScale / 2, wmax = 8 * kScale;  // edge weight range
};

/// A generated network together with the recipe needed to rebuild the
/// class-specific query structure and the realized reduction counts.
struct GeneratedNetwork {
  Network net;
  NetClass cls = NetClass::SeriesParallel;
  long long s = 0, p = 0;  // realized creation-history operation counts
  VertexId u = 0, v = 1;   // terminals (ParallelPath, Abacus, SeriesParallel)
  std::vector<VertexId> cycle;                      // BeadChain
  std::vector<std::pair<VertexId, VertexId>> arcs;  // BeadChain
  std::vector<AbacusChainSpec> chains;              // Abacus
};

namespace detail {

// Uniform edge weight on the spec range, snapped to a multiple of four
// units so every derived quantity stays on the shared even grid.
inline Length tk_weight(const GenSpec& g, std::mt19937_64& rng) {
  Length lo = std::max<Length>(1, (g.wmin + 3) / 4);
  Length hi = std::max(lo, g.wmax / 4);
  return 4 * std::uniform_int_distribution<Length>(lo, hi)(rng);
}

inline void tk_check_budget(const GenSpec& g) {
  if (g.s < 0 || g.p < 0) throw BudgetExceeded("negative size parameter");
  if ((long long)g.s + g.p > 400000) throw BudgetExceeded("network too large");
  if (g.wmin <= 0 || g.wmax < g.wmin)
    throw BudgetExceeded("invalid weight range");
}

inline GeneratedNetwork tk_single_edge(const GenSpec& g,
                                       std::mt19937_64& rng) {
  GeneratedNetwork out{Network(2, {{0, 1, tk_weight(g, rng)}}), g.cls};
  if (g.cls == NetClass::Abacus) out.chains = {{{0, 1}, {}}};
  return out;
}

inline GeneratedNetwork tk_gen_parallel_path(const GenSpec& g,
                                             std::mt19937_64& rng) {
  int paths = std::max(1, g.p);
  std::vector<int> extra(paths, 0);
  for (int k = 0; k < g.s; ++k)
    ++extra[std::uniform_int_distribution<int>(0, paths - 1)(rng)];
  // At most one branch may be a bare u-v edge; bump the rest so the graph
  // stays simple without a subdivision pass.
  bool bare = false;
  for (int& e : extra) {
    if (e == 0 && (bare || paths == 1)) e = 1;
    if (e == 0) bare = true;
  }
  std::vector<std::tuple<VertexId, VertexId, Length>> es;
  VertexId nv = 2;
  for (int j = 0; j < paths; ++j) {
    VertexId prev = 0;
    for (int k = 0; k <= extra[j]; ++k) {
      VertexId next = k == extra[j] ? 1 : nv++;
      es.emplace_back(prev, next, tk_weight(g, rng));
      prev = next;
    }
  }
  GeneratedNetwork out{build_network(nv, es), g.cls};
  return out;
}

inline GeneratedNetwork tk_gen_bead_chain(const GenSpec& g,
                                          std::mt19937_64& rng) {
  int m = std::max(3, g.s);
  std::vector<std::tuple<VertexId, VertexId, Length>> es;
  std::vector<Length> pref = {0};
  for (int k = 0; k < m; ++k) {
    Length w = tk_weight(g, rng);
    es.emplace_back(k, (k + 1) % m, w);
    pref.push_back(pref.back() + w);
  }
  // Arc spans are pairwise disjoint vertex intervals along the cycle.
  int narcs = std::min(g.p, m / 2);
  std::vector<int> idx(m);
  for (int k = 0; k < m; ++k) idx[k] = k;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(2 * narcs);
  std::sort(idx.begin(), idx.end());
  GeneratedNetwork out{Network(2, {{0, 1, 2}}), g.cls};  // placeholder net
  VertexId nv = m;
  for (int k = 0; k + 1 < (int)idx.size(); k += 2) {
    int ia = idx[k], ib = idx[k + 1];
    Length wbeta = pref[ib] - pref[ia];
    Length total =
        wbeta + 4 * std::uniform_int_distribution<Length>(0, 16)(rng);
    // A two-edge arc keeps the graph simple even over a one-edge span.
    Length w1 = 4 * std::uniform_int_distribution<Length>(
                        1, std::max<Length>(1, total / 8))(rng);
    if (w1 >= total) w1 = total / 2;
    if (w1 <= 0) w1 = 2, total = std::max(total, w1 + 2);
    VertexId mid = nv++;
    es.emplace_back(ia, mid, w1);
    es.emplace_back(mid, ib, total - w1);
    out.arcs.emplace_back(ia, ib);
  }
  out.net = build_network(nv, es);
  out.cycle.resize(m);
  for (int k = 0; k < m; ++k) out.cycle[k] = k;
  return out;
}

inline GeneratedNetwork tk_gen_abacus(const GenSpec& g, std::mt19937_64& rng) {
  int paths = std::max(1, g.p);
  std::vector<int> extra(paths, 0);
  for (int k = 0; k < g.s; ++k)
    ++extra[std::uniform_int_distribution<int>(0, paths - 1)(rng)];
  bool bare = false;
  for (int& e : extra) {
    if (e == 0 && (bare || paths == 1)) e = 1;
    if (e == 0) bare = true;
  }
  std::vector<std::tuple<VertexId, VertexId, Length>> es;
  std::vector<AbacusChainSpec> specs;
  VertexId nv = 2;
  for (int j = 0; j < paths; ++j) {
    int len = extra[j] + 1;
    AbacusChainSpec sp;
    sp.path.push_back(0);
    std::vector<Length> pref = {0};
    VertexId prev = 0;
    for (int k = 0; k < len; ++k) {
      VertexId next = k + 1 == len ? 1 : nv++;
      Length w = tk_weight(g, rng);
      es.emplace_back(prev, next, w);
      pref.push_back(pref.back() + w);
      sp.path.push_back(next);
      prev = next;
    }
    // Up to two arcs per chain on disjoint index intervals of the path.
    int smax = std::min<int>(2, len / 2);
    int na = smax > 0 ? (int)(rng() % (smax + 1)) : 0;
    std::vector<int> idx(len + 1);
    for (int k = 0; k <= len; ++k) idx[k] = k;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(2 * na);
    std::sort(idx.begin(), idx.end());
    for (int k = 0; k + 1 < (int)idx.size(); k += 2) {
      int ia = idx[k], ib = idx[k + 1];
      if (ia == ib) continue;
      Length wbeta = pref[ib] - pref[ia];
      Length total =
          wbeta + 4 * std::uniform_int_distribution<Length>(0, 16)(rng);
      Length w1 = 4 * std::uniform_int_distribution<Length>(
                          1, std::max<Length>(1, total / 8))(rng);
      if (w1 >= total) w1 = total / 2;
      if (w1 <= 0) w1 = 2, total = std::max(total, w1 + 2);
      VertexId mid = nv++;
      es.emplace_back(sp.path[ia], mid, w1);
      es.emplace_back(mid, sp.path[ib], total - w1);
      sp.arcs.emplace_back(sp.path[ia], sp.path[ib]);
    }
    specs.push_back(std::move(sp));
  }
  GeneratedNetwork out{build_network(nv, es), g.cls};
  out.chains = std::move(specs);
  return out;
}

inline GeneratedNetwork tk_gen_series_parallel(const GenSpec& g,
                                               std::mt19937_64& rng) {
  struct GrowEdge {
    VertexId u, v;
  };
  std::vector<GrowEdge> es = {{0, 1}};
  VertexId nv = 2;
  // Part of the series budget is withheld to split residual parallel pairs
  // after the interleaved phase, so the realized history usually has
  // exactly the requested operation counts.
  int hold = std::min(g.s, g.p);
  std::vector<char> ops(g.s - hold + g.p, 0);
  std::fill(ops.begin(), ops.begin() + (g.s - hold), 1);
  std::shuffle(ops.begin(), ops.end(), rng);
  auto key = [](const GrowEdge& e) {
    auto [lo, hi] = std::minmax(e.u, e.v);
    return std::make_pair(lo, hi);
  };
  for (char op : ops) {
    int e = std::uniform_int_distribution<int>(0, (int)es.size() - 1)(rng);
    if (op) {
      VertexId x = nv++;
      es.push_back({x, es[e].v});
      es[e].v = x;
    } else {
      es.push_back(es[e]);
    }
  }
  // Spend the withheld series budget first on residual parallel pairs,
  // then on random edges; leftovers beyond the budget still get
  // subdivided, costing extra realized series operations.
  std::map<std::pair<VertexId, VertexId>, int> seen;
  auto split = [&](int k) {
    VertexId x = nv++;
    es.push_back({x, es[k].v});
    es[k].v = x;
  };
  for (int k = 0; k < (int)es.size(); ++k) {
    if (seen[key(es[k])]++ == 0) continue;
    split(k);
    if (hold > 0) --hold;
  }
  while (hold-- > 0)
    split(std::uniform_int_distribution<int>(0, (int)es.size() - 1)(rng));
  std::vector<std::tuple<VertexId, VertexId, Length>> fin;
  for (const GrowEdge& e : es) fin.emplace_back(e.u, e.v, tk_weight(g, rng));
  GeneratedNetwork out{build_network(nv, fin), g.cls};
  return out;
}

}  // namespace detail

/// Deterministic random network of the requested class, plus its structure
/// recipe.  Realized reduction counts are filled in from sp_reduce.
inline GeneratedNetwork generate_full(const GenSpec& g) {
  detail::tk_check_budget(g);
  std::mt19937_64 rng(g.seed);
  GeneratedNetwork out = [&] {
    if (g.s == 0 && g.p == 0) return detail::tk_single_edge(g, rng);
    switch (g.cls) {
      case NetClass::ParallelPath:
        return detail::tk_gen_parallel_path(g, rng);
      case NetClass::BeadChain:
        return detail::tk_gen_bead_chain(g, rng);
      case NetClass::Abacus:
        return detail::tk_gen_abacus(g, rng);
      default:
        return detail::tk_gen_series_parallel(g, rng);
    }
  }();
  CreationHistory h = sp_reduce(out.net);
  out.s = h.s;
  out.p = h.p;
  return out;
}

inline Network generate(const GenSpec& g) { return generate_full(g).net; }

/// Query structure matching a generated network's class.
struct FastEngine {
  std::optional<ParallelPathStructure> pp;
  std::optional<BeadChainStructure> bc;
  std::optional<AbacusStructure> ab;
  std::optional<AbacusTree> tree;

  FarthestResult query(PointOnEdge q) const {
    if (pp) return farthest_points_pp(*pp, q);
    if (bc) return farthest_points_bc(*bc, q);
    if (ab) return farthest_points_abacus(*ab, q);
    return farthest_points_sp(*tree, q);
  }
};

inline FastEngine build_structure(const GeneratedNetwork& g) {
  FastEngine eng;
  if (g.net.edge_count() == 1) {
    eng.pp = build_parallel_path(g.net, g.u, g.v);
    return eng;
  }
  switch (g.cls) {
    case NetClass::ParallelPath:
      eng.pp = build_parallel_path(g.net, g.u, g.v);
      break;
    case NetClass::BeadChain:
      eng.bc = build_bead_chain(g.net, g.cycle, g.arcs);
      break;
    case NetClass::Abacus:
      eng.ab = build_abacus(g.net, g.u, g.v, g.chains);
      break;
    default:
      eng.tree = decompose(g.net);
  }
  return eng;
}

/// One disagreement between a fast engine and the brute-force oracle; the
/// query replays directly against the stored network.
struct MismatchWitness {
  PointOnEdge q;
  FarthestResult want, got;
};

struct EquivalenceReport {
  long long checked = 0;
  std::vector<MismatchWitness> mismatches;

  bool ok() const { return mismatches.empty(); }
};

/// Compares a fast query callable to the oracle on every vertex plus
/// `sample_count` random edge-interior points at rational lambdas with
/// denominator at most 64 (snapped to the even grid).
template <class Query>
EquivalenceReport check_equivalence(const Network& net, Query&& fast,
                                    int sample_count, std::uint64_t seed) {
  EquivalenceReport rep;
  std::mt19937_64 rng(seed);
  auto run = [&](PointOnEdge q) {
    FarthestResult want = oracle_farthest(net, q);
    FarthestResult got = fast(q);
    ++rep.checked;
    if (!(got == want)) rep.mismatches.push_back({q, want, got});
  };
  for (VertexId v = 0; v < net.vertex_count(); ++v)
    run(vertex_point(net, v));
  for (int k = 0; k < sample_count; ++k) {
    EdgeId e =
        std::uniform_int_distribution<int>(0, net.edge_count() - 1)(rng);
    Length w = net.edge(e).w;
    Length b = std::uniform_int_distribution<Length>(1, 64)(rng);
    Length a = std::uniform_int_distribution<Length>(0, b)(rng);
    Length off = w / b * a + w % b * a / b;
    run(make_point(net, e, off - off % 2));
  }
  return rep;
}

inline EquivalenceReport check_equivalence(const GeneratedNetwork& g,
                                           const FastEngine& eng,
                                           int sample_count,
                                           std::uint64_t seed) {
  return check_equivalence(
      g.net, [&](PointOnEdge q) { return eng.query(q); }, sample_count, seed);
}

}  // namespace spfar

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "spfar/bead_chain.hpp"
#include "spfar/oracle.hpp"
#include "fixtures.hpp"

using namespace spfar;

namespace {

constexpr Length U = kScale;

BeadChainStructure bc1_chain() {
  return build_bead_chain(fixtures::bc1(), {0, 1, 2, 3}, {{0, 1}});
}

BeadChainStructure bc2_chain() {
  return build_bead_chain(fixtures::bc2(), {0, 1, 2, 3}, {{0, 1}});
}

// Cycle a-b-c-d (weight 1 each) with symmetric arcs a-e-b and c-f-d.
Network two_arc_net() {
  return fixtures::from_text(
      "6 8\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n0 4 1.5\n4 1 1.5\n2 5 1.5\n5 3 1.5\n");
}

BeadChainStructure two_arc_chain() {
  return build_bead_chain(two_arc_net(), {0, 1, 2, 3}, {{0, 1}, {2, 3}});
}

int geometric_breakpoints(const CyclicEnvelope& H) {
  int m = H.seg_count(), cnt = 0;
  auto slope = [&](int i) {
    Length dv = H.seg_end_value(i) - H.vs[i];
    return dv == 0 ? 0 : (dv > 0 ? 1 : -1);
  };
  for (int i = 0; i < m; ++i)
    if (slope(i) != slope((i + m - 1) % m)) ++cnt;
  return cnt;
}

// Brute-force farthest-arc data at a doubled cycle position.
std::pair<Length, std::set<int>> brute_arcs(const BeadChainStructure& ch,
                                            Length x2) {
  Length best = -1;
  std::set<int> ids;
  for (int i = 0; i < static_cast<int>(ch.arcs.size()); ++i) {
    if (i == ch.overlong) continue;
    Length v = detail::arc_value2(ch, i, x2);
    if (v > best) {
      best = v;
      ids.clear();
    }
    if (v == best) ids.insert(i);
  }
  return {best, ids};
}

struct RandomChain {
  Network net;
  BeadChainStructure chain;
};

RandomChain random_chain(std::mt19937_64& rng) {
  const Length quantum = U / 4;  // even, keeps all anchors exact
  while (true) {
    int m = 3 + static_cast<int>(rng() % 8);
    std::vector<std::tuple<VertexId, VertexId, Length>> es;
    for (int k = 0; k < m; ++k)
      es.push_back({k, (k + 1) % m, quantum * (1 + static_cast<Length>(rng() % 12))});
    int smax = m / 2;
    int s = static_cast<int>(rng() % (std::min(smax, 3) + 1));
    std::vector<int> idx(m);
    for (int k = 0; k < m; ++k) idx[k] = k;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(2 * s);
    std::sort(idx.begin(), idx.end());
    std::vector<Length> pref(m, 0);
    for (int k = 1; k < m; ++k) pref[k] = pref[k - 1] + std::get<2>(es[k - 1]);
    Length circ = pref[m - 1] + std::get<2>(es[m - 1]);
    std::vector<std::pair<VertexId, VertexId>> arcs;
    VertexId nv = m;
    for (int k = 0; k < s; ++k) {
      VertexId a = idx[2 * k], b = idx[2 * k + 1];
      Length wbeta = pref[b] - pref[a];
      if (s == 1 && rng() % 3 == 0) {
        std::swap(a, b);  // overlong variant: span the long way round
        wbeta = circ - wbeta;
      }
      Length total = wbeta + quantum * static_cast<Length>(rng() % 10);
      int t = static_cast<int>(rng() % 3);  // interior vertices
      int span = std::abs(idx[2 * k + 1] - idx[2 * k]);
      if (t == 0 && (span == 1 || span == m - 1)) t = 1;  // avoid parallel edge
      std::vector<Length> ws(t + 1, 0);
      Length acc = 0;
      for (int j = 0; j < t; ++j) {
        ws[j] = quantum * (1 + static_cast<Length>(rng() % 4));
        acc += ws[j];
      }
      if (total <= acc) total = acc + quantum * (1 + static_cast<Length>(rng() % 6));
      ws[t] = total - acc;
      VertexId prev = a;
      for (int j = 0; j <= t; ++j) {
        VertexId next = j == t ? b : nv++;
        es.push_back({prev, next, ws[j]});
        prev = next;
      }
      arcs.push_back({a, b});
    }
    Network net = build_network(nv, es);
    std::vector<VertexId> cyc(m);
    for (int k = 0; k < m; ++k) cyc[k] = k;
    BeadChainStructure chain = build_bead_chain(net, cyc, arcs);
    return {std::move(net), std::move(chain)};
  }
}

}  // namespace

TEST_CASE("BC1 decomposition and arc shape") {
  BeadChainStructure ch = bc1_chain();
  REQUIRE(ch.cycle.circ == 4 * U);
  REQUIRE(ch.arcs.size() == 1);
  const BCArc& a = ch.arcs[0];
  CHECK(a.walpha == 3 * U);
  CHECK(a.wbeta == 1 * U);
  CHECK(a.wgamma == 3 * U);
  CHECK_FALSE(detect_overlong(ch).has_value());

  ArcDistanceShape s = arc_distance(ch, 0);
  CHECK(s.low == 4 * U);       // doubled (1 + 3) / 2
  CHECK(s.high == 6 * U);      // doubled (3 + 3) / 2
  CHECK(s.a == 0);
  CHECK(s.b == 2 * U);
  CHECK(s.bar_a == 4 * U);     // vertex c
  CHECK(s.bar_b == 6 * U);     // vertex d
  // Spot value at the midpoint of bc (cycle position 1.5).
  CHECK(detail::arc_value2(ch, 0, 3 * U) == 5 * U);  // doubled 2.5
  CHECK(ch.H.value_at(3 * U) == 5 * U);
}

TEST_CASE("overlong detection") {
  BeadChainStructure ch = bc2_chain();
  REQUIRE(detect_overlong(ch).has_value());
  CHECK(*detect_overlong(ch) == 0);
  CHECK(ch.arcs[0].wbeta == 5 * U);
  CHECK(ch.arcs[0].wgamma == 3 * U);
  CHECK(ch.over_pp.has_value());
  CHECK(ch.H.seg_count() == 0);  // envelope over zero remaining arcs

  // Plain cycle: no arcs at all.
  Network sq = fixtures::from_text("4 4\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n");
  BeadChainStructure plain = build_bead_chain(sq, {0, 1, 2, 3}, {});
  CHECK_FALSE(detect_overlong(plain).has_value());
}

TEST_CASE("invalid decompositions are rejected") {
  // Arc attached at a single vertex.
  Network loopback = fixtures::from_text(
      "6 7\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n0 4 1\n4 5 1\n5 0 1\n");
  CHECK_THROWS_AS(build_bead_chain(loopback, {0, 1, 2, 3}, {{0, 0}}),
                  InvalidBeadChain);
  // Arc shorter than its spanned cycle portion.
  Network shortarc = fixtures::from_text(
      "5 6\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n0 4 0.5\n4 2 0.5\n");
  CHECK_THROWS_AS(build_bead_chain(shortarc, {0, 1, 2, 3}, {{0, 2}}),
                  InvalidBeadChain);
  // Edge outside cycle and arcs.
  Network chord = fixtures::from_text(
      "4 5\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n0 2 1\n");
  CHECK_THROWS_AS(build_bead_chain(chord, {0, 1, 2, 3}, {}), InvalidBeadChain);
  // Overlapping spans.
  Network cross = fixtures::from_text(
      "6 8\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n0 4 1.5\n4 2 1.5\n1 5 1.5\n5 3 1.5\n");
  CHECK_THROWS_AS(build_bead_chain(cross, {0, 1, 2, 3}, {{0, 2}, {1, 3}}),
                  InvalidBeadChain);
}

TEST_CASE("farthest arc queries on the two-arc variant") {
  BeadChainStructure ch = two_arc_chain();
  REQUIRE(ch.arcs.size() == 2);
  CHECK(geometric_breakpoints(ch.H) <= 4 * 2 + 2);

  // From b both entry distances favor the opposite arc.
  auto [db, arcs_b] = farthest_arc_query(ch, vertex_point(ch.net, 1));
  CHECK(db == 3 * U);
  CHECK(arcs_b == std::vector<int>{1});
  // Midpoint of bc is the crossing: both arcs attain 2.5.
  auto [dm, arcs_m] = farthest_arc_query(ch.net.find_edge(1, 2) >= 0
                                             ? ch
                                             : ch,
                                         {ch.net.find_edge(1, 2), U / 2});
  CHECK(dm == 5 * U / 2);
  CHECK(arcs_m == std::vector<int>{0, 1});
  // BC1 single-arc case.
  BeadChainStructure c1 = bc1_chain();
  auto [dc, arcs_c] = farthest_arc_query(c1, vertex_point(c1.net, 2));
  CHECK(dc == 3 * U);
  CHECK(arcs_c == std::vector<int>{0});
}

TEST_CASE("worked farthest-point queries") {
  BeadChainStructure c1 = bc1_chain();
  // q = e: distance 3, farthest point at the midpoint of cd.
  FarthestResult r1 = farthest_points_bc(c1, vertex_point(c1.net, 4));
  CHECK(r1.distance == 3 * U);
  EdgeId cd = c1.net.find_edge(2, 3);
  REQUIRE(r1.points == std::vector<PointOnEdge>{{cd, U / 2}});
  // q = c: distance 3, farthest point on ae at 1 from a.
  FarthestResult r2 = farthest_points_bc(c1, vertex_point(c1.net, 2));
  CHECK(r2.distance == 3 * U);
  EdgeId ae = c1.net.find_edge(0, 4);
  REQUIRE(r2.points == std::vector<PointOnEdge>{{ae, U}});

  // BC2, q = f: answered through the parallel-path structure over alpha u C.
  BeadChainStructure c2 = bc2_chain();
  PointOnEdge f = vertex_point(c2.net, 4);
  CHECK(farthest_points_bc(c2, f) == oracle_farthest(c2.net, f));
}

TEST_CASE("random bead chains match the oracle") {
  std::mt19937_64 rng(20260826);
  int overlong_seen = 0;
  for (int iter = 0; iter < 120; ++iter) {
    RandomChain rc = random_chain(rng);
    const Network& net = rc.net;
    const BeadChainStructure& ch = rc.chain;
    int s = static_cast<int>(ch.arcs.size()) - (ch.overlong >= 0 ? 1 : 0);
    if (ch.overlong >= 0) ++overlong_seen;
    if (ch.H.seg_count() > 0)
      CHECK(geometric_breakpoints(ch.H) <= 4 * s + 2);

    // High and low plateaus of the non-overlong arcs are disjoint and
    // cycle-ordered.
    std::vector<ArcDistanceShape> shapes;
    for (int i = 0; i < static_cast<int>(ch.arcs.size()); ++i)
      if (i != ch.overlong) shapes.push_back(arc_distance(ch, i));
    std::sort(shapes.begin(), shapes.end(),
              [](const ArcDistanceShape& x, const ArcDistanceShape& y) {
                return x.bar_a < y.bar_a;
              });
    const Length c2 = 2 * ch.cycle.circ;
    auto check_disjoint = [&](auto key_a, auto key_b) {
      for (std::size_t k = 0; k + 1 < shapes.size(); ++k) {
        Length end = detail::bc_mod(key_b(shapes[k]) - key_a(shapes[0]), c2);
        Length nxt = detail::bc_mod(key_a(shapes[k + 1]) - key_a(shapes[0]), c2);
        CHECK(end <= nxt);
      }
    };
    check_disjoint([](const ArcDistanceShape& s) { return s.bar_a; },
                   [](const ArcDistanceShape& s) { return s.bar_b; });

    std::vector<PointOnEdge> queries;
    for (VertexId v = 0; v < net.vertex_count(); ++v)
      queries.push_back(vertex_point(net, v));
    for (int j = 0; j < 12; ++j) {
      EdgeId e = static_cast<EdgeId>(rng() % net.edge_count());
      Length off = static_cast<Length>(rng() % (net.edge(e).w + 1));
      queries.push_back(make_point(net, e, off));
    }
    double logn = std::log2(static_cast<double>(net.vertex_count()) + 1);
    for (const PointOnEdge& q : queries) {
      ProbeScope ps;
      FarthestResult got = farthest_points_bc(ch, q);
      long long budget = static_cast<long long>(got.points.size()) +
                         static_cast<long long>(8 * logn) + 8;
      FarthestResult want = oracle_farthest(net, q);
      REQUIRE(got.distance == want.distance);
      REQUIRE(got.points == want.points);
      CHECK(ps.used() <= budget);
    }

    // Farthest-arc queries against brute force, plus the relevant-list
    // consecutiveness of Corollary 1.
    if (ch.overlong < 0 && s >= 1) {
      for (int j = 0; j < 10; ++j) {
        Length x = static_cast<Length>(rng() % ch.cycle.circ);
        PointOnEdge q = cycle_point(ch, x);
        int k = ch.edge_sub[q.edge];
        if (ch.edge_kind[q.edge] != 0) continue;  // snapped onto an arc edge
        const Edge& ed = net.edge(q.edge);
        Length off = ed.u == ch.cycle.verts[k] ? q.offset : ed.w - q.offset;
        Length x2 = 2 * (ch.cycle.pref[k] + off);
        auto [bd2, bids] = brute_arcs(ch, x2);
        auto [gd, gids] = farthest_arc_query(ch, q);
        REQUIRE(2 * gd == bd2);
        REQUIRE(std::set<int>(gids.begin(), gids.end()) == bids);

        const int r = static_cast<int>(ch.relevant.arcs.size());
        if (r >= 3) {
          std::set<int> rising;
          for (int arc : bids) {
            Length lo = detail::arc_value2(ch, arc, x2 - 1);
            Length hi = detail::arc_value2(ch, arc, x2 + 1);
            if (hi > lo) rising.insert(arc);
          }
          std::vector<int> pos;
          for (int p = 0; p < r; ++p)
            if (rising.count(ch.relevant.arcs[p])) pos.push_back(p);
          if (pos.size() >= 2) {
            // contiguous modulo r: at most one gap around the circle
            int gaps = 0;
            for (std::size_t t = 0; t < pos.size(); ++t) {
              int nxt = pos[(t + 1) % pos.size()];
              int cur = pos[t];
              int fwd = (nxt - cur + r) % r;
              if (fwd != 1) ++gaps;
            }
            CHECK(gaps <= 1);
          }
        }
      }
    }
  }
  CHECK(overlong_seen > 5);  // the generator exercises the overlong path
}

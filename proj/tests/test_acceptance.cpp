// Acceptance sweep: one pass/fail line per criterion, nonzero exit on any
// failure.  Everything is exact; no tolerances anywhere.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <vector>

#include "spfar/testkit.hpp"

using namespace spfar;

namespace {

constexpr Length U = kScale;

int g_failures = 0;

void report(int idx, const char* name, bool ok) {
  std::printf("criterion %d (%s): %s\n", idx, name, ok ? "PASS" : "FAIL");
  if (!ok) ++g_failures;
}

GenSpec sized_spec(NetClass cls, std::uint64_t seed, int i) {
  std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (i + 1));
  int s = std::uniform_int_distribution<int>(0, 22)(rng);
  int p = s == 0 ? 0
                 : std::uniform_int_distribution<int>(
                       1, std::max(1, s / 2 + 1))(rng);
  return {seed + (std::uint64_t)i, cls, s, p};
}

// --- criterion 1: oracle equivalence, 200 nets x 50 queries x 4 classes ---

bool oracle_equivalence() {
  bool ok = true;
  for (NetClass cls : {NetClass::ParallelPath, NetClass::BeadChain,
                       NetClass::Abacus, NetClass::SeriesParallel}) {
    for (int i = 0; i < 200; ++i) {
      GeneratedNetwork gen = generate_full(sized_spec(cls, 20260826, i));
      if (gen.net.vertex_count() > 60) {
        std::printf("  class %d instance %d exceeds n=60\n", (int)cls, i);
        return false;
      }
      FastEngine eng = build_structure(gen);
      EquivalenceReport rep = check_equivalence(gen, eng, 50, i + 1);
      if (!rep.ok()) {
        ok = false;
        const MismatchWitness& w = rep.mismatches.front();
        std::printf("  class %d instance %d: edge %d offset %s\n", (int)cls,
                    i, w.q.edge, format_decimal(w.q.offset).c_str());
      }
    }
  }
  return ok;
}

// --- criterion 2: worked fixtures -----------------------------------------

Network net_pp1() { return Network(3, {{0, 1, 2 * U}, {0, 2, 3 * U}, {2, 1, 3 * U}}); }
Network net_bc1() {
  return Network(5, {{0, 1, U},
                     {1, 2, U},
                     {2, 3, U},
                     {3, 0, U},
                     {0, 4, 3 * U / 2},
                     {4, 1, 3 * U / 2}});
}
Network net_ab1() {
  return Network(4, {{0, 1, 2 * U},
                     {0, 2, 3 * U},
                     {2, 1, 3 * U},
                     {0, 3, 5 * U / 2},
                     {3, 2, 5 * U / 2}});
}
Network net_sp1() {
  return Network(5, {{0, 1, 10 * U},
                     {0, 2, 2 * U},
                     {2, 3, 3 * U / 2},
                     {3, 1, 3 * U / 2},
                     {2, 4, 2 * U},
                     {4, 1, 2 * U}});
}

bool expect(const Network& net, const FarthestResult& r, Length dist,
            const std::vector<PointOnEdge>& pts, const char* tag) {
  bool ok = r.distance == dist;
  if (!pts.empty()) {
    std::vector<PointOnEdge> want;
    for (PointOnEdge p : pts) want.push_back(canonicalize(net, p));
    ok = ok && r.points == want;
  }
  if (!ok)
    std::printf("  fixture %s: distance %s, %zu points\n", tag,
                format_decimal(r.distance).c_str(), r.points.size());
  return ok;
}

bool worked_fixtures() {
  bool ok = true;
  {
    Network net = net_pp1();
    ParallelPathStructure s = build_parallel_path(net, 0, 1);
    // Edges: 0 uv, 1 ux, 2 xv.
    ok &= expect(net, farthest_points_pp(s, make_point(net, 1, U / 2)), 4 * U,
                 {{2, 3 * U / 2}}, "pp1 lambda=1/6 on ux");
    ok &= expect(net, farthest_points_pp(s, vertex_point(net, 2)), 4 * U,
                 {{0, U}}, "pp1 q=x");
    ok &= expect(net, farthest_points_pp(s, make_point(net, 1, 2 * U)), 4 * U,
                 {vertex_point(net, 1)}, "pp1 q at t=2");
  }
  {
    Network net = net_bc1();
    // Cycle a(0) b(1) c(2) d(3); arc a-e-b; edges 2=cd, 4=ae.
    BeadChainStructure ch = build_bead_chain(net, {0, 1, 2, 3}, {{0, 1}});
    ok &= expect(net, farthest_points_bc(ch, vertex_point(net, 4)), 3 * U,
                 {{2, U / 2}}, "bc1 q=e");
    ok &= expect(net, farthest_points_bc(ch, vertex_point(net, 2)), 3 * U,
                 {{4, U}}, "bc1 q=c");
  }
  {
    Network net = net_ab1();
    // Edges: 0 uv, 1 ux, 2 xv, 3 uy, 4 yx.
    AbacusStructure s =
        build_abacus(net, 0, 1, {{{0, 1}, {}}, {{0, 2, 1}, {{0, 2}}}});
    ok &= expect(net, farthest_points_abacus(s, make_point(net, 0, U)), 5 * U,
                 {{4, 3 * U / 2}}, "ab1 q=mid-uv");
    ok &= expect(net, farthest_points_abacus(s, vertex_point(net, 3)), 5 * U,
                 {{2, 5 * U / 2}}, "ab1 q=y");
  }
  {
    Network net = net_sp1();
    AbacusTree T = decompose(net);
    ok &= expect(net, farthest_points_sp(T, vertex_point(net, 0)),
                 15 * U / 2, {}, "sp1 q=u");
    ok &= expect(net, farthest_points_sp(T, vertex_point(net, 4)), 8 * U, {},
                 "sp1 q=c");
  }
  return ok;
}

// --- criterion 3: structural lemma suite ----------------------------------

int geometric_breakpoints(const CyclicEnvelope& e) {
  int n = e.seg_count(), out = 0;
  auto slope = [&](int i) {
    Length dv = e.seg_end_value(i) - e.vs[i];
    return dv == 0 ? 0 : (dv > 0 ? 1 : -1);
  };
  for (int i = 0; i < n; ++i)
    if (slope(i) != slope((i + n - 1) % n) ||
        e.vs[i] != e.value_on_seg((i + n - 1) % n, e.xs[i]))
      ++out;
  return out;
}

bool structural_lemmas() {
  bool ok = true;
  // Lemma 2(i): the sub-path weight stored as d(u,v) is the true terminal
  // distance on every parallel-path and abacus instance.
  for (NetClass cls : {NetClass::ParallelPath, NetClass::Abacus}) {
    for (int i = 0; i < 100; ++i) {
      GeneratedNetwork gen = generate_full(sized_spec(cls, 31, i));
      std::vector<Length> du =
          distances_from(gen.net, vertex_point(gen.net, 0));
      Length stored = cls == NetClass::ParallelPath
                          ? build_parallel_path(gen.net, 0, 1).duv
                          : build_abacus(gen.net, 0, 1, gen.chains).duv;
      if (gen.net.edge_count() == 1) stored = gen.net.edge(0).w;
      if (stored != du[1]) {
        std::printf("  lemma 2(i) fails on class %d instance %d\n", (int)cls,
                    i);
        ok = false;
      }
    }
  }
  // Lemma 3 and the envelope bounds over 1000 random bead-chains.
  int overlong_seen = 0;
  for (int i = 0; i < 1000; ++i) {
    GeneratedNetwork gen = generate_full(sized_spec(NetClass::BeadChain, 77, i));
    if (gen.net.edge_count() == 1) continue;
    std::optional<BeadChainStructure> built;
    try {
      built.emplace(build_bead_chain(gen.net, gen.cycle, gen.arcs));
    } catch (const TwoOverlongArcs&) {
      std::printf("  two overlong arcs on instance %d\n", i);
      ok = false;
      continue;
    }
    const BeadChainStructure& ch = *built;
    if (detect_overlong(ch)) ++overlong_seen;
    int s = (int)ch.arcs.size() - (ch.overlong >= 0 ? 1 : 0);
    if (s > 0 && geometric_breakpoints(ch.H) > 4 * s + 2) {
      std::printf("  envelope breakpoint bound fails on instance %d\n", i);
      ok = false;
    }
    // Plateau ordering: a, b, bar_a, bar_b cyclic per arc; high plateaus of
    // distinct arcs are disjoint (envelope_two_pass throws otherwise).
    const Length c2 = 2 * ch.cycle.circ;
    for (int k = 0; k < (int)ch.arcs.size(); ++k) {
      if (k == ch.overlong) continue;
      ArcDistanceShape sh = arc_distance(ch, k);
      Length b = detail::bc_mod(sh.b - sh.a, c2);
      Length ba = detail::bc_mod(sh.bar_a - sh.a, c2);
      Length bb = detail::bc_mod(sh.bar_b - sh.a, c2);
      if (!(b <= ba && ba <= bb)) {
        std::printf("  plateau order fails on instance %d arc %d\n", i, k);
        ok = false;
      }
    }
  }
  if (overlong_seen == 0) {
    std::printf("  no overlong arcs generated\n");
    ok = false;
  }
  return ok;
}

// --- criterion 4: envelope algorithm equivalence --------------------------

// Direct evaluation of a (possibly synthetic) tent shape on the cycle.
Length href(const ArcDistanceShape& s, Length C, Length x) {
  auto mod = [&](Length y) { return ((y % C) + C) % C; };
  if (mod(x - s.a) <= mod(s.b - s.a)) return s.low;
  if (mod(x - s.bar_a) <= mod(s.bar_b - s.bar_a)) return s.high;
  if (mod(x - s.b) < mod(s.bar_a - s.b)) return s.low + mod(x - s.b);
  return s.high - mod(x - s.bar_b);
}

PLFunction unwrap_tent(const ArcDistanceShape& s, Length C) {
  std::set<Length> cuts = {0, C};
  auto mod = [&](Length y) { return ((y % C) + C) % C; };
  for (Length p : {s.a, s.b, s.bar_a, s.bar_b}) cuts.insert(mod(p));
  PLFunction f;
  f.owner = s.owner;
  for (Length x : cuts) {
    f.xs.push_back(x);
    f.vs.push_back(href(s, C, x % C));
  }
  return f;
}

bool envelope_equivalence() {
  std::mt19937 rng(991);
  int valid = 0;
  bool ok = true;
  for (int attempt = 0; attempt < 4000 && valid < 500; ++attempt) {
    int p = 1 + (int)(rng() % 4);
    Length C = 2 * (4 * p + 4 + (Length)(rng() % 40));
    std::set<Length> cuts;
    while ((int)cuts.size() < 2 * p)
      cuts.insert(2 * ((Length)rng() % (C / 2)));
    std::vector<Length> cv(cuts.begin(), cuts.end());
    std::vector<ArcDistanceShape> fs;
    bool usable = true;
    for (int i = 0; i < p; ++i) {
      ArcDistanceShape s;
      s.owner = i;
      s.a = cv[2 * i];
      s.b = cv[2 * i + 1];
      Length len = s.b - s.a;
      Length dmax = (C - len) / 2;
      if (dmax < 2) {
        usable = false;
        break;
      }
      Length d = 2 * (1 + (Length)rng() % (dmax / 2));
      s.bar_a = (s.b + d) % C;
      s.bar_b = (s.bar_a + (C - len - 2 * d)) % C;
      s.low = 2 * (Length)(rng() % 20);
      s.high = s.low + d;
      fs.push_back(s);
    }
    if (!usable) continue;
    std::sort(fs.begin(), fs.end(),
              [](const ArcDistanceShape& a, const ArcDistanceShape& b) {
                return a.bar_a < b.bar_a;
              });
    auto md = [&](Length y) { return ((y % C) + C) % C; };
    Length org = fs[0].bar_a, prev_end = 0;
    bool overlap = false;
    for (const ArcDistanceShape& s : fs) {
      Length A = md(s.bar_a - org);
      Length B = A + md(s.bar_b - s.bar_a);
      if (A < prev_end || B > C) overlap = true;
      prev_end = B;
    }
    if (overlap) continue;
    ++valid;
    TwoPassResult r = envelope_two_pass(C, fs);
    std::vector<PLFunction> lin;
    for (const ArcDistanceShape& s : fs)
      lin.push_back(unwrap_tent(s, C));
    Envelope u1 = upper_envelope(lin);
    for (Length x = 0; x < C; x += 2)
      if (u1.value_at(x) != r.H.value_at(x)) {
        std::printf("  envelopes differ at x=%lld (family %d)\n",
                    (long long)x, valid);
        ok = false;
        break;
      }
  }
  if (valid < 500) {
    std::printf("  only %d valid families drawn\n", valid);
    ok = false;
  }
  return ok;
}

// --- criterion 5: complexity evidence -------------------------------------

bool complexity_evidence() {
  bool ok = true;
  // Probe budget: probes <= k + c*log2(n) with the single constant c.
  const long long c = 48;
  for (NetClass cls : {NetClass::ParallelPath, NetClass::BeadChain,
                       NetClass::Abacus, NetClass::SeriesParallel}) {
    for (int i = 0; i < 60; ++i) {
      GeneratedNetwork gen = generate_full(sized_spec(cls, 555, i));
      FastEngine eng = build_structure(gen);
      std::mt19937_64 rng(i);
      const double lg = std::log2((double)gen.net.vertex_count());
      for (int rep = 0; rep < 30; ++rep) {
        EdgeId e = (EdgeId)(rng() % gen.net.edge_count());
        Length w = gen.net.edge(e).w;
        PointOnEdge q =
            make_point(gen.net, e, 2 * (Length)(rng() % (w / 2 + 1)));
        ProbeScope probes;
        FarthestResult r = eng.query(q);
        long long budget =
            (long long)r.points.size() + (long long)(c * lg);
        if (probes.used() > budget) {
          std::printf("  probe budget: class %d instance %d used %lld > %lld\n",
                      (int)cls, i, probes.used(), budget);
          ok = false;
        }
      }
    }
  }
  // Construction at n = 1e5, p = 1e3 in under five seconds.
  {
    Network net = generate({11, NetClass::SeriesParallel, 100000, 1000});
    auto t0 = std::chrono::steady_clock::now();
    AbacusTree T = decompose(net);
    double sec = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
    std::printf("  build n=%d m=%d: %.3fs\n", net.vertex_count(),
                net.edge_count(), sec);
    if (sec >= 5.0 || T.nodes.empty()) ok = false;
  }
  // Reduction step count is exactly s + p.
  for (int i = 0; i < 100; ++i) {
    GeneratedNetwork gen =
        generate_full(sized_spec(NetClass::SeriesParallel, 808, i));
    CreationHistory h = sp_reduce(gen.net);
    if ((long long)h.ops.size() != h.s + h.p ||
        (long long)h.ops.size() != gen.s + gen.p) {
      std::printf("  step count mismatch on instance %d\n", i);
      ok = false;
    }
  }
  return ok;
}

// --- criterion 6: rejection -----------------------------------------------

template <class Ex, class Fn>
bool throws(Fn&& fn) {
  try {
    fn();
  } catch (const Ex&) {
    return true;
  } catch (...) {
  }
  return false;
}

bool rejection() {
  bool ok = true;
  ok &= throws<NotSeriesParallel>([] {
    sp_reduce(Network(4, {{0, 1, U},
                          {0, 2, U},
                          {0, 3, U},
                          {1, 2, U},
                          {1, 3, U},
                          {2, 3, U}}));
  });
  // Wheatstone bridge u-a-v / u-b-v with cross arc a-m-b plus the uv chord.
  ok &= throws<NotSeriesParallel>([] {
    sp_reduce(Network(5, {{0, 2, U},
                          {2, 1, U},
                          {0, 3, U},
                          {3, 1, U},
                          {2, 4, U},
                          {4, 3, U},
                          {0, 1, 4 * U}}));
  });
  ok &= throws<NotSimple>([] { Network(2, {{0, 0, U}}); });
  ok &= throws<NotSimple>([] { Network(2, {{0, 1, U}, {1, 0, U}}); });
  ok &= throws<NotConnected>([] { Network(4, {{0, 1, U}, {2, 3, U}}); });
  return ok;
}

}  // namespace

int main() {
  report(1, "oracle equivalence, 4 classes x 200 nets x 50 queries",
         oracle_equivalence());
  report(2, "worked fixtures PP1/BC1/AB1/SP1", worked_fixtures());
  report(3, "structural lemma suite", structural_lemmas());
  report(4, "envelope two-pass vs divide-and-conquer, 500 families",
         envelope_equivalence());
  report(5, "complexity evidence", complexity_evidence());
  report(6, "rejection of non-series-parallel and malformed inputs",
         rejection());
  return g_failures == 0 ? 0 : 1;
}

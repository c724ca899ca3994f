#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "spfar/cascade.hpp"
#include "spfar/pl.hpp"

using namespace spfar;

namespace {

PLFunction constant(int owner, Length lo, Length hi, Length v) {
  PLFunction f;
  f.owner = owner;
  f.xs = {lo, hi};
  f.vs = {v, v};
  return f;
}

Length eval_pl(const PLFunction& f, Length x) {
  REQUIRE(x >= f.xs.front());
  REQUIRE(x <= f.xs.back());
  auto it = std::upper_bound(f.xs.begin(), f.xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - f.xs.begin());
  if (i == f.xs.size()) --i;
  --i;
  Length dv = f.vs[i + 1] - f.vs[i];
  int s = dv == 0 ? 0 : (dv > 0 ? 1 : -1);
  return f.vs[i] + s * (x - f.xs[i]);
}

std::set<int> owners_of(const AttSet& a) {
  std::set<int> out;
  for (const EnvAtt& e : a) out.insert(e.owner);
  return out;
}

// Direct evaluation of an arc distance shape on its cycle.
Length href(const ArcDistanceShape& s, Length C, Length x) {
  auto mod = [&](Length y) { return ((y % C) + C) % C; };
  if (mod(x - s.a) <= mod(s.b - s.a)) return s.low;
  if (mod(x - s.bar_a) <= mod(s.bar_b - s.bar_a)) return s.high;
  if (mod(x - s.b) < mod(s.bar_a - s.b)) return s.low + mod(x - s.b);
  return s.high - mod(x - s.bar_b);
}

Length hmax(const std::vector<ArcDistanceShape>& fs, Length C, Length x) {
  Length best = std::numeric_limits<Length>::min();
  for (const ArcDistanceShape& s : fs) best = std::max(best, href(s, C, x));
  return best;
}

void check_cyclic_against_direct(const std::vector<ArcDistanceShape>& fs,
                                 Length C, const CyclicEnvelope& H) {
  for (Length x = 0; x < C; ++x) {
    CAPTURE(x);
    REQUIRE(H.value_at(x) == hmax(fs, C, x));
  }
  // Every segment owner (and co-owner) attains the envelope on its segment.
  for (int i = 0; i < H.seg_count(); ++i) {
    const ArcDistanceShape* own = nullptr;
    for (const ArcDistanceShape& s : fs)
      if (s.owner == H.owner[i]) own = &s;
    REQUIRE(own != nullptr);
    REQUIRE(href(*own, C, H.xs[i]) == H.vs[i]);
    Length xe = H.seg_end(i) % C;
    REQUIRE(href(*own, C, xe) == H.seg_end_value(i));
    for (int c : H.co[i]) {
      const ArcDistanceShape* cs = nullptr;
      for (const ArcDistanceShape& s : fs)
        if (s.owner == c) cs = &s;
      REQUIRE(cs != nullptr);
      REQUIRE(href(*cs, C, H.xs[i]) == H.vs[i]);
      REQUIRE(href(*cs, C, xe) == H.seg_end_value(i));
    }
  }
}

// Positions where the envelope's slope changes; representation seams and
// ownership handoffs on a straight stretch do not count.
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

// Unwraps a shape into a linear function on [0, C] for the divide-and-
// conquer envelope.
PLFunction unwrap_shape(const ArcDistanceShape& s, Length C) {
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

}  // namespace

TEST_CASE("upper envelope of two constants") {
  std::vector<PLFunction> fs = {constant(0, 0, 10, 4), constant(1, 0, 10, 2)};
  TwoLevels lv = envelope_and_second_level(fs);
  REQUIRE(lv.u1.value_at(0) == 4);
  REQUIRE(lv.u1.value_at(7) == 4);
  REQUIRE(owners_of(lv.u1.attainers_at(5)) == std::set<int>{0});
  REQUIRE(lv.u2.value_at(5) == 2);
  REQUIRE(owners_of(lv.u2.attainers_at(5)) == std::set<int>{1});
}

TEST_CASE("second level needs at least two functions") {
  std::vector<PLFunction> fs = {constant(0, 0, 10, 4)};
  REQUIRE_THROWS_AS(envelope_and_second_level(fs), FewerThanTwoFunctions);
  Envelope e = upper_envelope(fs);
  REQUIRE(e.value_at(3) == 4);
}

TEST_CASE("crossing tents produce exact breakpoints and attainers") {
  // Two tents crossing at x = 10 with value 8.
  PLFunction a{0, {0, 6, 20}, {2, 8, 8}, {}};   // rises then flat
  PLFunction b{1, {0, 14, 20}, {12, 12, 6}, {}};  // flat then falls
  TwoLevels lv = envelope_and_second_level({a, b});
  REQUIRE(lv.u1.value_at(0) == 12);
  REQUIRE(lv.u1.value_at(14) == 12);
  REQUIRE(lv.u1.value_at(16) == 10);
  REQUIRE(lv.u1.value_at(18) == 8);
  REQUIRE(owners_of(lv.u1.attainers_at(18)) == std::set<int>({0, 1}));
  REQUIRE(lv.u1.value_at(20) == 8);
  REQUIRE(owners_of(lv.u1.attainers_at(20)) == std::set<int>{0});
  REQUIRE(lv.u2.value_at(0) == 2);
  REQUIRE(lv.u2.value_at(10) == 8);
  REQUIRE(lv.u2.value_at(18) == 8);
}

TEST_CASE("exclusion query falls through to the second level") {
  std::vector<PLFunction> fs = {constant(0, 0, 10, 4), constant(1, 0, 10, 2),
                                constant(2, 0, 10, 2)};
  TwoLevels lv = envelope_and_second_level(fs);
  auto [v0, a0] = eval_excluding(lv.u1, lv.u2, 5, 0);
  REQUIRE(v0 == 2);
  REQUIRE(owners_of(a0) == std::set<int>({1, 2}));
  auto [v1, a1] = eval_excluding(lv.u1, lv.u2, 5, 1);
  REQUIRE(v1 == 4);
  REQUIRE(owners_of(a1) == std::set<int>{0});
}

TEST_CASE("payloads ride through the envelope") {
  PLFunction a{0, {0, 8}, {0, 8}, {{7, 2, 1}}};
  PLFunction b{1, {0, 8}, {8, 0}, {{9, 20, -1}}};
  TwoLevels lv = envelope_and_second_level({a, b});
  const AttSet& att = lv.u1.attainers_at(6);
  REQUIRE(att.size() == 1);
  REQUIRE(att[0].owner == 0);
  REQUIRE(att[0].pay.edge == 7);
  REQUIRE(att[0].pay.c + att[0].pay.s * 6 == 8);
  const AttSet& att2 = lv.u1.attainers_at(2);
  REQUIRE(att2.size() == 1);
  REQUIRE(att2[0].pay.edge == 9);
  REQUIRE(att2[0].pay.c + att2[0].pay.s * 2 == 18);
}

TEST_CASE("random families match a direct scan of both levels") {
  std::mt19937 rng(20240817);
  const Length hi = 40;
  for (int trial = 0; trial < 120; ++trial) {
    int k = 2 + static_cast<int>(rng() % 4);
    std::vector<PLFunction> fs;
    for (int i = 0; i < k; ++i) {
      PLFunction f;
      f.owner = i;
      Length x = 0;
      Length v = 2 * (static_cast<Length>(rng() % 11) - 5);
      f.xs.push_back(x);
      f.vs.push_back(v);
      while (x < hi) {
        Length step = 2 * (1 + static_cast<Length>(rng() % 6));
        x = std::min(hi, x + step);
        int s = static_cast<int>(rng() % 3) - 1;
        v += s * (x - f.xs.back());
        f.xs.push_back(x);
        f.vs.push_back(v);
      }
      fs.push_back(std::move(f));
    }
    TwoLevels lv = envelope_and_second_level(fs);
    for (Length x = 0; x <= hi; ++x) {
      std::vector<Length> vals;
      for (const PLFunction& f : fs) vals.push_back(eval_pl(f, x));
      std::vector<Length> sorted = vals;
      std::sort(sorted.rbegin(), sorted.rend());
      Length u1 = sorted[0], u2 = sorted[1];
      CAPTURE(trial, x);
      REQUIRE(lv.u1.value_at(x) == u1);
      REQUIRE(lv.u2.value_at(x) == u2);
      std::set<int> o1, o2;
      for (int i = 0; i < k; ++i) {
        if (vals[i] == u1) o1.insert(i);
        if (vals[i] == u2) o2.insert(i);
      }
      REQUIRE(owners_of(lv.u1.attainers_at(x)) == o1);
      REQUIRE(owners_of(lv.u2.attainers_at(x)) == o2);
    }
    // Structural sanity of the top envelope.
    for (int i = 0; i + 1 < static_cast<int>(lv.u1.xs.size()); ++i) {
      Length dx = lv.u1.xs[i + 1] - lv.u1.xs[i];
      Length dv = lv.u1.vs[i + 1] - lv.u1.vs[i];
      REQUIRE(dx > 0);
      REQUIRE((dv == 0 || dv == dx || dv == -dx));
    }
  }
}

TEST_CASE("skip pointers jump over equal attainer runs") {
  std::vector<PLFunction> fs = {constant(0, 0, 10, 4), constant(1, 0, 10, 2)};
  TwoLevels lv = envelope_and_second_level(fs);
  for (int i = 0; i < lv.u1.seg_count(); ++i) {
    int f = lv.u1.skip_fwd[i];
    if (f < lv.u1.seg_count()) REQUIRE(lv.u1.satt[f] != lv.u1.satt[i]);
    for (int j = i + 1; j < f; ++j) REQUIRE(lv.u1.satt[j] == lv.u1.satt[i]);
  }
}

TEST_CASE("cascade locates predecessors in every list") {
  CascadeStructure cs({{1, 5, 9}, {2, 6}});
  std::vector<int> r = cs.query(5);
  REQUIRE(r == std::vector<int>({1, 0}));
  REQUIRE(cs.query(0) == std::vector<int>({-1, -1}));
  REQUIRE(cs.query(100) == std::vector<int>({2, 1}));
}

TEST_CASE("cascade rejects unsorted input") {
  REQUIRE_THROWS_AS(CascadeStructure({{3, 1}}), UnsortedInput);
}

TEST_CASE("cascade agrees with binary search on random lists") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int m = 1 + static_cast<int>(rng() % 6);
    std::vector<std::vector<Length>> lists(m);
    for (auto& l : lists) {
      int len = static_cast<int>(rng() % 8);
      for (int i = 0; i < len; ++i) l.push_back(static_cast<Length>(rng() % 100));
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    CascadeStructure cs(lists);
    for (int q = 0; q < 30; ++q) {
      Length key = static_cast<Length>(rng() % 110) - 5;
      std::vector<int> got = cs.query(key);
      for (int i = 0; i < m; ++i) {
        auto it = std::upper_bound(lists[i].begin(), lists[i].end(), key);
        REQUIRE(got[i] == static_cast<int>(it - lists[i].begin()) - 1);
      }
    }
  }
}

TEST_CASE("single arc shape reproduces its tent and plateau") {
  ArcDistanceShape s{0, 0, 2, 4, 6, 4, 6};
  TwoPassResult r = envelope_two_pass(8, {s});
  REQUIRE(r.H.value_at(0) == 4);
  REQUIRE(r.H.value_at(1) == 4);
  REQUIRE(r.H.value_at(3) == 5);
  REQUIRE(r.H.value_at(5) == 6);
  REQUIRE(r.H.value_at(7) == 5);
  // The partial envelope extends the tent below the low plateau.
  REQUIRE(r.Hp.value_at(1) == 3);
  REQUIRE(r.Hp.value_at(5) == 6);
  check_cyclic_against_direct({s}, 8, r.H);
}

TEST_CASE("two symmetric arcs split the cycle") {
  std::vector<ArcDistanceShape> fs = {{1, 4, 6, 0, 2, 4, 6},
                                      {0, 0, 2, 4, 6, 4, 6}};
  TwoPassResult r = envelope_two_pass(8, fs);
  REQUIRE(r.H.value_at(1) == 6);
  REQUIRE(r.H.value_at(3) == 5);
  REQUIRE(r.H.value_at(5) == 6);
  REQUIRE(r.H.value_at(7) == 5);
  REQUIRE(r.H.owner[r.H.find_seg(1)] == 1);
  REQUIRE(r.H.owner[r.H.find_seg(5)] == 0);
  check_cyclic_against_direct(fs, 8, r.H);
  REQUIRE(geometric_breakpoints(r.H) <= 4 * 2 + 2);
}

TEST_CASE("low plateau tying the envelope records a co-owner") {
  // Shape 1 sits higher; its low plateau coincides with shape 0's top.
  std::vector<ArcDistanceShape> fs = {{1, 4, 6, 0, 2, 6, 8},
                                      {0, 0, 2, 4, 6, 4, 6}};
  TwoPassResult r = envelope_two_pass(8, fs);
  REQUIRE(r.H.value_at(0) == 8);
  REQUIRE(r.H.value_at(3) == 7);
  REQUIRE(r.H.value_at(5) == 6);
  REQUIRE(r.H.value_at(7) == 7);
  int seg = r.H.find_seg(5);
  REQUIRE(r.H.owner[seg] == 0);
  REQUIRE(r.H.co[seg] == std::vector<int>{1});
  check_cyclic_against_direct(fs, 8, r.H);
}

TEST_CASE("shared ascents stay with the first inserted shape") {
  // Both rising flanks lie on the line v = x + 4; they overlap on [12,14].
  std::vector<ArcDistanceShape> fs = {{0, 0, 4, 14, 22, 8, 18},
                                      {1, 4, 12, 22, 26, 16, 26}};
  TwoPassResult r = envelope_two_pass(32, fs);
  check_cyclic_against_direct(fs, 32, r.H);
  REQUIRE(r.H.value_at(13) == 17);
  REQUIRE(r.H.owner[r.H.find_seg(13)] == 0);
  REQUIRE(r.H.owner[r.H.find_seg(11)] == 1);
  REQUIRE(r.H.owner[r.H.find_seg(18)] == 1);
}

TEST_CASE("overlong arc shapes are rejected") {
  ArcDistanceShape s{0, 0, 2, 4, 6, 7, 6};
  REQUIRE_THROWS_AS(envelope_two_pass(8, {s}), OverlongArcPresent);
}

TEST_CASE("overlapping high plateaus are rejected") {
  std::vector<ArcDistanceShape> fs = {{0, 12, 14, 0, 6, 2, 6},
                                      {1, 14, 16, 4, 10, 4, 8}};
  REQUIRE_THROWS_AS(envelope_two_pass(16, fs), PlateauOverlap);
}

TEST_CASE("random cyclic families: two passes match the direct envelope") {
  std::mt19937 rng(991);
  int valid = 0;
  for (int attempt = 0; attempt < 800 && valid < 200; ++attempt) {
    int p = 1 + static_cast<int>(rng() % 4);
    Length C = 2 * (4 * p + 4 + static_cast<Length>(rng() % 40));
    // Disjoint low intervals from 2p distinct even cuts.
    std::set<Length> cuts;
    while (static_cast<int>(cuts.size()) < 2 * p)
      cuts.insert(2 * (static_cast<Length>(rng()) % (C / 2)));
    std::vector<Length> cv(cuts.begin(), cuts.end());
    std::vector<ArcDistanceShape> fs;
    bool ok = true;
    for (int i = 0; i < p; ++i) {
      ArcDistanceShape s;
      s.owner = i;
      s.a = cv[2 * i];
      s.b = cv[2 * i + 1];
      Length len = s.b - s.a;
      Length dmax = (C - len) / 2;
      if (dmax < 2) {
        ok = false;
        break;
      }
      Length d = 2 * (1 + static_cast<Length>(rng()) % (dmax / 2));
      s.bar_a = (s.b + d) % C;
      s.bar_b = (s.bar_a + (C - len - 2 * d)) % C;
      s.low = 2 * (static_cast<Length>(rng() % 20));
      s.high = s.low + d;
      fs.push_back(s);
    }
    if (!ok) continue;
    std::sort(fs.begin(), fs.end(),
              [](const ArcDistanceShape& a, const ArcDistanceShape& b) {
                return a.bar_a < b.bar_a;
              });
    // Derived high plateaus may still collide; skip those draws.
    auto md = [&](Length y) { return ((y % C) + C) % C; };
    Length org = fs[0].bar_a;
    bool overlap = false;
    Length prev_end = 0;
    for (const ArcDistanceShape& s : fs) {
      Length A = md(s.bar_a - org);
      Length B = A + md(s.bar_b - s.bar_a);
      if (A < prev_end || B > C) overlap = true;
      prev_end = B;
    }
    if (overlap) continue;
    ++valid;
    CAPTURE(attempt, C, p);
    TwoPassResult r = envelope_two_pass(C, fs);
    check_cyclic_against_direct(fs, C, r.H);
    REQUIRE(geometric_breakpoints(r.H) <= 4 * p + 2);
    REQUIRE(r.steps <= 16 * p);
    // Same envelope via the divide-and-conquer construction.
    std::vector<PLFunction> lin;
    for (const ArcDistanceShape& s : fs) lin.push_back(unwrap_shape(s, C));
    Envelope u1 = upper_envelope(lin);
    for (Length x = 0; x < C; ++x) REQUIRE(u1.value_at(x) == r.H.value_at(x));
  }
  REQUIRE(valid == 200);
}

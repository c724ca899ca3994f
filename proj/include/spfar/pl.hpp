#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "spfar/length.hpp"
#include "spfar/network.hpp"
#include "spfar/probes.hpp"

// Piecewise-linear machinery: unit-slope functions, upper envelopes with
// full attainer bookkeeping, second levels, and the two-pass cyclic envelope.
//
// Coordinate convention: every position and value in this header lives in
// DOUBLED half-micro units (caller values multiplied by two).  Crossings of
// unit-slope segments anchored at even coordinates then stay integral, so
// all envelope breakpoints are exact.

namespace spfar {

class FewerThanTwoFunctions : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class OverlongArcPresent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class PlateauOverlap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr Length kNegInf = std::numeric_limits<Length>::min() / 4;

/// Where an attained farthest point lives: original edge plus an affine map
/// from the envelope coordinate x to the offset along that edge,
/// offset = c + s*x (all in doubled units; s in {-1,0,+1}).
struct Payload {
  EdgeId edge = -1;
  Length c = 0;
  int s = 0;

  friend bool operator==(const Payload&, const Payload&) = default;
};

/// Continuous piecewise-linear function with slopes in {-1,0,+1} over a
/// linear interval [xs.front(), xs.back()].
struct PLFunction {
  int owner = -1;
  std::vector<Length> xs;
  std::vector<Length> vs;
  std::vector<Payload> pay;  // optional, one per segment

  void validate() const {
    if (xs.size() < 2 || xs.size() != vs.size())
      throw std::logic_error("PLFunction needs >= 2 breakpoints");
    for (std::size_t i = 1; i < xs.size(); ++i) {
      Length dx = xs[i] - xs[i - 1];
      Length dv = vs[i] - vs[i - 1];
      if (dx <= 0) throw std::logic_error("PLFunction positions not increasing");
      if (dv != 0 && dv != dx && dv != -dx)
        throw std::logic_error("PLFunction slope outside {-1,0,+1}");
    }
    // Even anchors keep every pairwise crossing on the integer grid.
    for (std::size_t i = 0; i < xs.size(); ++i)
      if ((xs[i] & 1) || (vs[i] & 1))
        throw std::logic_error("PLFunction breakpoints must be even");
    if (!pay.empty() && pay.size() + 1 != xs.size())
      throw std::logic_error("PLFunction payload count mismatch");
  }
};

struct EnvAtt {
  int owner = -1;
  Payload pay;

  friend bool operator==(const EnvAtt&, const EnvAtt&) = default;
};

using AttSet = std::vector<EnvAtt>;  // sorted by owner, unique owners

/// Upper envelope (or second level) over a linear domain with exact
/// attainer sets per segment and per breakpoint.
struct Envelope {
  std::vector<Length> xs;     // m+1 breakpoints
  std::vector<Length> vs;     // values at breakpoints
  std::vector<AttSet> satt;   // m sets: attainers on the open segment
  std::vector<AttSet> patt;   // m+1 sets: attainers at each breakpoint
  std::vector<int> skip_fwd;  // per segment: next segment with different satt
  std::vector<int> skip_bwd;  // per segment: previous such segment
  std::vector<int> link;      // per segment: twin segment in the other level

  bool empty() const { return xs.empty(); }
  int seg_count() const { return static_cast<int>(satt.size()); }
  Length lo() const { return xs.front(); }
  Length hi() const { return xs.back(); }

  /// Segment containing x (breakpoints resolve to the segment on their
  /// right, except at the far end).  Counts one probe per bisection step.
  int find_seg(Length x) const {
    int lo_i = 0, hi_i = seg_count() - 1;
    while (lo_i < hi_i) {
      int mid = (lo_i + hi_i) / 2;
      probe();
      if (x < xs[mid + 1])
        hi_i = mid;
      else
        lo_i = mid + 1;
    }
    return lo_i;
  }

  Length value_on_seg(int i, Length x) const {
    Length dx = xs[i + 1] - xs[i];
    Length dv = vs[i + 1] - vs[i];
    int slope = dv == 0 ? 0 : (dv > 0 ? 1 : -1);
    return vs[i] + slope * (x - xs[i]);
  }

  Length value_at(Length x) const { return value_on_seg(find_seg(x), x); }

  /// Attainers at x: breakpoint set when x is a breakpoint, else the
  /// segment set.
  const AttSet& attainers_at(Length x) const {
    int i = find_seg(x);
    if (x == xs[i]) return patt[i];
    if (x == xs[i + 1]) return patt[i + 1];
    return satt[i];
  }
};

namespace detail {

inline void att_union_into(AttSet& dst, const AttSet& src) {
  for (const EnvAtt& a : src) {
    bool found = false;
    for (const EnvAtt& d : dst)
      if (d.owner == a.owner) {
        found = true;
        break;
      }
    if (!found) dst.push_back(a);
  }
}

inline void att_sort(AttSet& s) {
  std::sort(s.begin(), s.end(),
            [](const EnvAtt& a, const EnvAtt& b) { return a.owner < b.owner; });
}

/// Incremental envelope builder; coalesces collinear segments whose
/// attainer bookkeeping is identical.
struct EnvBuilder {
  Envelope env;

  void start(Length x, Length v, AttSet patt) {
    env.xs = {x};
    env.vs = {v};
    env.patt = {std::move(patt)};
  }

  // Appends the segment (prev_x, x] with segment attainers satt and
  // breakpoint attainers patt at x.
  void push(Length x, Length v, AttSet satt, AttSet patt) {
    att_sort(satt);
    att_sort(patt);
    if (x == env.xs.back()) {
      // Zero-length: merge attainers into the pending breakpoint.
      att_union_into(env.patt.back(), patt);
      att_sort(env.patt.back());
      return;
    }
    if (!env.satt.empty()) {
      std::size_t m = env.satt.size();
      Length px = env.xs[m - 1], pv = env.vs[m - 1];
      Length dx1 = env.xs[m] - px, dv1 = env.vs[m] - pv;
      Length dx2 = x - env.xs[m], dv2 = v - env.vs[m];
      bool collinear = dv1 * dx2 == dv2 * dx1;
      if (collinear && env.satt.back() == satt && env.patt.back() == satt) {
        env.xs.back() = x;
        env.vs.back() = v;
        env.patt.back() = std::move(patt);
        return;
      }
    }
    env.xs.push_back(x);
    env.vs.push_back(v);
    env.satt.push_back(std::move(satt));
    env.patt.push_back(std::move(patt));
  }

  Envelope take() { return std::move(env); }
};

/// A line over one elementary interval: value at the left end plus slope.
struct Line {
  Length v0 = kNegInf;
  int s = 0;
  const Envelope* env = nullptr;  // source (null for the "absent" line)
  int seg = -1;

  Length at(Length x0, Length x) const {
    if (v0 <= kNegInf / 2) return kNegInf;
    return v0 + s * (x - x0);
  }
};

inline Line line_of(const Envelope& e, int seg, Length x0) {
  Line l;
  l.env = &e;
  l.seg = seg;
  Length dv = e.vs[seg + 1] - e.vs[seg];
  l.s = dv == 0 ? 0 : (dv > 0 ? 1 : -1);
  l.v0 = e.vs[seg] + l.s * (x0 - e.xs[seg]);
  return l;
}

/// Attainers of the source envelope at position x (point set when x is a
/// source breakpoint).
inline const AttSet& line_att_at(const Line& l, Length x) {
  static const AttSet kEmpty;
  if (!l.env) return kEmpty;
  const Envelope& e = *l.env;
  if (x == e.xs[l.seg]) return e.patt[l.seg];
  if (x == e.xs[l.seg + 1]) return e.patt[l.seg + 1];
  return e.satt[l.seg];
}

inline void add_crossing(std::vector<Length>& ev, const Line& a, const Line& b,
                         Length x0, Length x1) {
  if (a.v0 <= kNegInf / 2 || b.v0 <= kNegInf / 2 || a.s == b.s) return;
  Length num = b.v0 - a.v0;
  Length den = a.s - b.s;  // in {-2,-1,1,2}
  if (num % den != 0) return;  // crosses off the integer grid: no sign change
                               // at integer coordinates in between
  Length xc = x0 + num / den;
  if (xc > x0 && xc < x1) ev.push_back(xc);
}

struct Levels {
  Envelope u1;
  Envelope u2;
  bool has_u2 = false;
};

inline Levels leaf_levels(const PLFunction& f) {
  Levels out;
  out.u1.xs = f.xs;
  out.u1.vs = f.vs;
  std::size_t m = f.xs.size() - 1;
  out.u1.satt.resize(m);
  out.u1.patt.resize(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    Payload p = f.pay.empty() ? Payload{} : f.pay[i];
    out.u1.satt[i] = {{f.owner, p}};
  }
  for (std::size_t i = 0; i <= m; ++i) {
    Payload p = f.pay.empty() ? Payload{}
                              : f.pay[i < m ? i : m - 1];
    out.u1.patt[i] = {{f.owner, p}};
  }
  return out;
}

inline Levels merge_levels(const Levels& A, const Levels& B) {
  const Envelope& a1 = A.u1;
  const Envelope& b1 = B.u1;
  // Merged event positions: all breakpoints of the four inputs.
  std::vector<Length> base;
  auto add_xs = [&](const Envelope& e) {
    if (!e.empty()) base.insert(base.end(), e.xs.begin(), e.xs.end());
  };
  add_xs(a1);
  add_xs(b1);
  if (A.has_u2) add_xs(A.u2);
  if (B.has_u2) add_xs(B.u2);
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());

  EnvBuilder out1, out2;
  int sa1 = 0, sb1 = 0, sa2 = 0, sb2 = 0;

  auto seg_advance = [](const Envelope& e, int& seg, Length x) {
    while (seg + 1 < e.seg_count() && x >= e.xs[seg + 1]) ++seg;
  };

  bool started = false;
  std::vector<Length> ev;
  for (std::size_t bi = 0; bi + 1 <= base.size(); ++bi) {
    Length x0 = base[bi];
    seg_advance(a1, sa1, x0);
    seg_advance(b1, sb1, x0);
    if (A.has_u2) seg_advance(A.u2, sa2, x0);
    if (B.has_u2) seg_advance(B.u2, sb2, x0);

    Line la1 = line_of(a1, sa1, x0);
    Line lb1 = line_of(b1, sb1, x0);
    Line la2 = A.has_u2 ? line_of(A.u2, sa2, x0) : Line{};
    Line lb2 = B.has_u2 ? line_of(B.u2, sb2, x0) : Line{};
    const Line* lines[4] = {&la1, &lb1, &la2, &lb2};

    auto level_values = [&](Length x, Length& v1, Length& v2) {
      Length va1 = la1.at(x0, x), vb1 = lb1.at(x0, x);
      Length va2 = la2.at(x0, x), vb2 = lb2.at(x0, x);
      v1 = std::max(va1, vb1);
      v2 = std::max({std::min(va1, vb1), va2, vb2});
    };

    auto point_atts = [&](Length x, Length v1, Length v2, AttSet& p1,
                          AttSet& p2) {
      for (const Line* l : lines) {
        if (!l->env) continue;
        Length lv = l->at(x0, x);
        if (lv == v1) att_union_into(p1, line_att_at(*l, x));
        if (lv == v2) att_union_into(p2, line_att_at(*l, x));
      }
      att_sort(p1);
      att_sort(p2);
    };

    if (!started) {
      Length v1, v2;
      level_values(x0, v1, v2);
      AttSet p1, p2;
      point_atts(x0, v1, v2, p1, p2);
      out1.start(x0, v1, std::move(p1));
      out2.start(x0, v2, std::move(p2));
      started = true;
    }
    if (bi + 1 == base.size()) break;
    Length x1 = base[bi + 1];

    ev.clear();
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        add_crossing(ev, *lines[i], *lines[j], x0, x1);
    ev.push_back(x1);
    std::sort(ev.begin(), ev.end());
    ev.erase(std::unique(ev.begin(), ev.end()), ev.end());

    Length prev = x0;
    for (Length xe : ev) {
      // Segment (prev, xe): no crossings strictly inside, so the max is a
      // line; identify contributors by equality at both endpoints.
      Length v1l, v2l, v1r, v2r;
      level_values(prev, v1l, v2l);
      level_values(xe, v1r, v2r);
      AttSet s1, s2;
      for (const Line* l : lines) {
        if (!l->env) continue;
        if (l->at(x0, prev) == v1l && l->at(x0, xe) == v1r)
          att_union_into(s1, l->env->satt[l->seg]);
        if (l->at(x0, prev) == v2l && l->at(x0, xe) == v2r)
          att_union_into(s2, l->env->satt[l->seg]);
      }
      AttSet p1, p2;
      point_atts(xe, v1r, v2r, p1, p2);
      out1.push(xe, v1r, std::move(s1), std::move(p1));
      out2.push(xe, v2r, std::move(s2), std::move(p2));
      prev = xe;
    }
  }

  Levels result;
  result.u1 = out1.take();
  result.u2 = out2.take();
  result.has_u2 = true;
  return result;
}

inline Levels build_levels(const std::vector<PLFunction>& fs, std::size_t lo,
                           std::size_t hi) {
  if (hi - lo == 1) return leaf_levels(fs[lo]);
  std::size_t mid = (lo + hi) / 2;
  Levels a = build_levels(fs, lo, mid);
  Levels b = build_levels(fs, mid, hi);
  return merge_levels(a, b);
}

inline void finish_pointers(Envelope& e) {
  int m = e.seg_count();
  e.skip_fwd.assign(m, m);
  e.skip_bwd.assign(m, -1);
  for (int i = m - 2; i >= 0; --i)
    e.skip_fwd[i] = e.satt[i + 1] == e.satt[i] ? e.skip_fwd[i + 1] : i + 1;
  for (int i = 1; i < m; ++i)
    e.skip_bwd[i] = e.satt[i - 1] == e.satt[i] ? e.skip_bwd[i - 1] : i - 1;
}

inline void cross_link(Envelope& a, Envelope& b) {
  a.link.assign(a.seg_count(), 0);
  b.link.assign(b.seg_count(), 0);
  int j = 0;
  for (int i = 0; i < a.seg_count(); ++i) {
    while (j + 1 < b.seg_count() && b.xs[j + 1] <= a.xs[i]) ++j;
    a.link[i] = j;
  }
  j = 0;
  for (int i = 0; i < b.seg_count(); ++i) {
    while (j + 1 < a.seg_count() && a.xs[j + 1] <= b.xs[i]) ++j;
    b.link[i] = j;
  }
}

}  // namespace detail

/// Upper envelope of the given functions (shared domain).
inline Envelope upper_envelope(const std::vector<PLFunction>& fs) {
  if (fs.empty()) throw std::logic_error("upper_envelope of nothing");
  for (const PLFunction& f : fs) {
    f.validate();
    if (f.xs.front() != fs[0].xs.front() || f.xs.back() != fs[0].xs.back())
      throw std::logic_error("envelope inputs on different domains");
  }
  detail::Levels lv = detail::build_levels(fs, 0, fs.size());
  detail::finish_pointers(lv.u1);
  return std::move(lv.u1);
}

struct TwoLevels {
  Envelope u1;  // pointwise max
  Envelope u2;  // second level (max with multiplicity two)
};

/// Envelope plus second level via divide and conquer
/// (U2 = max(min(U1a, U1b), U2a, U2b) per merge).
inline TwoLevels envelope_and_second_level(const std::vector<PLFunction>& fs) {
  if (fs.size() < 2)
    throw FewerThanTwoFunctions("second level needs >= 2 functions");
  for (const PLFunction& f : fs) {
    f.validate();
    if (f.xs.front() != fs[0].xs.front() || f.xs.back() != fs[0].xs.back())
      throw std::logic_error("envelope inputs on different domains");
  }
  detail::Levels lv = detail::build_levels(fs, 0, fs.size());
  detail::finish_pointers(lv.u1);
  detail::finish_pointers(lv.u2);
  detail::cross_link(lv.u1, lv.u2);
  return {std::move(lv.u1), std::move(lv.u2)};
}

/// Maximum over all functions except `excluded`, evaluated at x, with the
/// attainer set.  Requires the TwoLevels pair; exact for any single
/// exclusion because U2 carries full attainers.
inline std::pair<Length, AttSet> eval_excluding(const Envelope& u1,
                                                const Envelope& u2, Length x,
                                                int excluded) {
  const AttSet& top = u1.attainers_at(x);
  AttSet rest;
  for (const EnvAtt& a : top)
    if (a.owner != excluded) rest.push_back(a);
  if (!rest.empty()) return {u1.value_at(x), std::move(rest)};
  if (u2.empty()) return {kNegInf, {}};
  const AttSet& second = u2.attainers_at(x);
  AttSet out;
  for (const EnvAtt& a : second)
    if (a.owner != excluded) out.push_back(a);
  if (out.empty()) return {kNegInf, {}};
  return {u2.value_at(x), std::move(out)};
}

// ---------------------------------------------------------------------------
// Cyclic two-pass envelope (arc distance shapes).

/// The farthest-into-arc distance function seen from the cycle: low plateau
/// `low` on the cyclic interval [a,b], high plateau `high` on [bar_a,bar_b],
/// unit slopes between; a, b, bar_a, bar_b appear in this cyclic order.
struct ArcDistanceShape {
  int owner = -1;
  Length a = 0, b = 0;
  Length bar_a = 0, bar_b = 0;
  Length low = 0, high = 0;
};

/// Piecewise-linear function on a cycle of the given circumference, cut at
/// position 0.  Segment i runs from xs[i] to xs[i+1] (the last one wraps to
/// the circumference, where the value is vs[0] again).
struct CyclicEnvelope {
  Length circumference = 0;
  std::vector<Length> xs;            // increasing, xs[0] == 0
  std::vector<Length> vs;            // values at the xs
  std::vector<int> owner;            // per segment
  std::vector<std::vector<int>> co;  // co-owners per segment (exact ties)

  int seg_count() const { return static_cast<int>(xs.size()); }

  Length seg_end(int i) const {
    return i + 1 < seg_count() ? xs[i + 1] : circumference;
  }
  Length seg_end_value(int i) const {
    return i + 1 < seg_count() ? vs[i + 1] : vs[0];
  }

  int find_seg(Length x) const {
    int lo = 0, hi = seg_count() - 1;
    while (lo < hi) {
      int mid = (lo + hi + 1) / 2;
      probe();
      if (xs[mid] <= x)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  Length value_on_seg(int i, Length x) const {
    Length dv = seg_end_value(i) - vs[i];
    int slope = dv == 0 ? 0 : (dv > 0 ? 1 : -1);
    return vs[i] + slope * (x - xs[i]);
  }

  Length value_at(Length x) const { return value_on_seg(find_seg(x), x); }
};

struct TwoPassResult {
  CyclicEnvelope H;   // final envelope
  CyclicEnvelope Hp;  // partial envelope (extended tents only)
  long long steps = 0;
};

/// Shift every position by +shift (mod circumference), cutting the result
/// at the new origin.
inline CyclicEnvelope rotate_cyclic(const CyclicEnvelope& e, Length shift) {
  const Length C = e.circumference;
  shift = ((shift % C) + C) % C;
  if (shift == 0) return e;
  Length cut = C - shift;  // old coordinate that becomes 0
  int s0 = e.find_seg(cut);
  int m = e.seg_count();
  CyclicEnvelope r;
  r.circumference = C;
  r.xs.push_back(0);
  r.vs.push_back(e.value_on_seg(s0, cut));
  r.owner.push_back(e.owner[s0]);
  r.co.push_back(e.co[s0]);
  for (int k = 1; k <= m; ++k) {
    int i = (s0 + k) % m;
    Length nx = ((e.xs[i] + shift) % C + C) % C;
    if (nx == 0) continue;
    r.xs.push_back(nx);
    r.vs.push_back(e.vs[i]);
    r.owner.push_back(e.owner[i]);
    r.co.push_back(e.co[i]);
  }
  return r;
}

namespace detail {

// Pass-1 state: upper envelope of extended tents over the unwrapped line.
// nx/nv are breakpoints; beyond the outermost nodes the envelope continues
// as unit-slope rays falling away.  owner[i] covers (nx[i], nx[i+1]).
struct TentSweep {
  std::vector<Length> nx, nv;
  std::vector<int> owner;
  int left_owner = -1, right_owner = -1;
  long long steps = 0;

  bool empty() const { return nx.empty(); }

  Length right_ray(Length x) const { return nv.back() - (x - nx.back()); }

  void reset(Length A, Length B, Length h, int o) {
    nx = {A, B};
    nv = {h, h};
    owner = {o};
    left_owner = right_owner = o;
  }

  // Insert the extended tent with top [A,B] at height h.  Tops arrive in
  // increasing position, so A >= nx.back() always holds on entry.
  void insert(Length A, Length B, Length h, int o) {
    ++steps;
    if (empty()) {
      reset(A, B, h, o);
      return;
    }
    Length eA = right_ray(A);
    if (h <= eA) {
      // Top at or below the envelope; it can only emerge where the falling
      // right ray reaches h.
      Length xc = A + (eA - h);
      if (xc >= B) return;
      if (xc > nx.back()) {
        owner.push_back(right_owner);
        nx.push_back(xc);
        nv.push_back(h);
      }
      if (B > nx.back()) {
        owner.push_back(o);
        nx.push_back(B);
        nv.push_back(h);
      }
      right_owner = o;
      return;
    }
    // Rising flank of the new tent overtakes the envelope somewhere left of
    // A: peel nodes strictly below the flank (ties stop the peeling, so the
    // first-inserted tent keeps shared ascents).
    int cut_owner = right_owner;
    Length pop_x = 0, pop_v = 0;
    bool popped = false;
    while (!empty() && h - (A - nx.back()) > nv.back()) {
      ++steps;
      pop_x = nx.back();
      pop_v = nv.back();
      popped = true;
      nx.pop_back();
      nv.pop_back();
      if (!owner.empty()) {
        cut_owner = owner.back();
        owner.pop_back();
      }
    }
    if (empty()) {
      reset(A, B, h, o);
      return;
    }
    Length xb = nx.back(), vb = nv.back();
    if (h - (A - xb) < vb) {
      // Crossing strictly inside the truncated segment (or on the old
      // right ray when nothing was popped).
      int s;
      if (popped) {
        Length dv = pop_v - vb;
        s = dv == 0 ? 0 : (dv == pop_x - xb ? 1 : -1);
      } else {
        s = -1;
      }
      if (s == 1) throw std::logic_error("flank parallel to rising segment");
      // Solve h - (A - x) = vb + s*(x - xb).
      Length num = vb - static_cast<Length>(s) * xb - h + A;
      Length den = 1 - s;
      if (num % den != 0) throw std::logic_error("non-integral tent crossing");
      Length xc = num / den;
      owner.push_back(cut_owner);
      nx.push_back(xc);
      nv.push_back(h - (A - xc));
    }
    owner.push_back(o);
    nx.push_back(A);
    nv.push_back(h);
    if (B > A) {
      owner.push_back(o);
      nx.push_back(B);
      nv.push_back(h);
    }
    right_owner = o;
  }

  Length eval(Length x) const {
    if (x <= nx.front()) return nv.front() - (nx.front() - x);
    if (x >= nx.back()) return nv.back() - (x - nx.back());
    auto it = std::upper_bound(nx.begin(), nx.end(), x);
    std::size_t i = static_cast<std::size_t>(it - nx.begin()) - 1;
    Length dv = nv[i + 1] - nv[i];
    int s = dv == 0 ? 0 : (dv == nx[i + 1] - nx[i] ? 1 : -1);
    return nv[i] + s * (x - nx[i]);
  }

  int owner_at(Length x) const {
    if (x < nx.front()) return left_owner;
    if (x >= nx.back()) return right_owner;
    auto it = std::upper_bound(nx.begin(), nx.end(), x);
    return owner[static_cast<std::size_t>(it - nx.begin()) - 1];
  }
};

}  // namespace detail

/// Two-pass construction of the cyclic upper envelope of arc distance
/// shapes.  Pass one inserts the extended tents (high plateaus with
/// unit-slope flanks) in cyclic top order; pass two overlays the low
/// plateaus.  Shapes must arrive ordered by high-plateau position.
inline TwoPassResult envelope_two_pass(Length circumference,
                                       const std::vector<ArcDistanceShape>& fs) {
  const Length C = circumference;
  if (fs.empty()) throw std::logic_error("envelope_two_pass of nothing");
  for (const ArcDistanceShape& f : fs)
    if (f.low > f.high)
      throw OverlongArcPresent("arc shape with low plateau above high");

  auto mod = [&](Length x) { return ((x % C) + C) % C; };
  const Length org = fs[0].bar_a;

  struct Interval {
    Length A, B, v;
    int owner;
  };
  std::vector<Interval> tops, lows;
  for (const ArcDistanceShape& f : fs) {
    Length ta = mod(f.bar_a - org);
    tops.push_back({ta, ta + mod(f.bar_b - f.bar_a), f.high, f.owner});
    Length la = mod(f.a - org);
    lows.push_back({la, la + mod(f.b - f.a), f.low, f.owner});
  }
  for (std::size_t i = 0; i + 1 < tops.size(); ++i) {
    if (tops[i + 1].A < tops[i].A)
      throw std::logic_error("shapes not ordered by high plateau");
    if (tops[i].B > tops[i + 1].A)
      throw PlateauOverlap("high plateaus overlap");
  }
  if (tops.size() > 1 && tops.back().B > C + tops.front().A)
    throw PlateauOverlap("high plateaus overlap around the seam");

  // Three unwrapped copies; the middle window [C, 2C) sees every tent
  // inserted on both of its sides.
  detail::TentSweep sweep;
  for (int copy = 0; copy < 3; ++copy)
    for (const Interval& t : tops)
      sweep.insert(t.A + copy * C, t.B + copy * C, t.v, t.owner);

  CyclicEnvelope hp;
  hp.circumference = C;
  hp.xs.push_back(0);
  hp.vs.push_back(sweep.eval(C));
  hp.owner.push_back(sweep.owner_at(C));
  for (std::size_t i = 0; i < sweep.nx.size(); ++i) {
    Length x = sweep.nx[i];
    if (x <= C || x >= 2 * C) continue;
    hp.xs.push_back(x - C);
    hp.vs.push_back(sweep.nv[i]);
    hp.owner.push_back(i < sweep.owner.size() ? sweep.owner[i]
                                              : sweep.right_owner);
  }
  if (sweep.eval(2 * C) != hp.vs[0])
    throw std::logic_error("cyclic envelope does not close");
  hp.co.assign(hp.xs.size(), {});

  // Pass two.  Low plateaus are pairwise disjoint arcs; split any piece
  // spanning the seam.
  std::vector<Interval> pieces;
  for (const Interval& l : lows) {
    if (l.B <= C) {
      pieces.push_back(l);
    } else {
      pieces.push_back({l.A, C, l.v, l.owner});
      pieces.push_back({0, l.B - C, l.v, l.owner});
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& a, const Interval& b) { return a.A < b.A; });
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
    if (pieces[i].B > pieces[i + 1].A)
      throw PlateauOverlap("low plateaus overlap");
  sweep.steps += static_cast<long long>(pieces.size());

  struct Seg {
    Length x0, x1, v0, v1;
    int own;
    std::vector<int> co;
  };
  std::vector<Seg> segs;
  auto add_seg = [&segs](Length x0, Length x1, Length v0, Length v1, int own,
                         std::vector<int> co) {
    if (x1 <= x0) return;
    std::sort(co.begin(), co.end());
    if (!segs.empty()) {
      Seg& p = segs.back();
      if (p.own == own && p.co == co &&
          (p.v1 - p.v0) * (x1 - x0) == (v1 - v0) * (p.x1 - p.x0)) {
        p.x1 = x1;
        p.v1 = v1;
        return;
      }
    }
    segs.push_back({x0, x1, v0, v1, own, std::move(co)});
  };

  std::vector<Length> events(hp.xs.begin(), hp.xs.end());
  for (const Interval& p : pieces) {
    events.push_back(p.A);
    if (p.B < C) events.push_back(p.B);
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  std::size_t pi = 0;
  for (std::size_t e = 0; e < events.size(); ++e) {
    Length x0 = events[e];
    Length x1 = e + 1 < events.size() ? events[e + 1] : C;
    if (x1 <= x0) continue;
    int seg = hp.find_seg(x0);
    Length ev0 = hp.value_on_seg(seg, x0);
    Length ev1 = hp.value_on_seg(seg, x1);
    int own = hp.owner[seg];
    while (pi < pieces.size() && pieces[pi].B <= x0) ++pi;
    const Interval* p = nullptr;
    if (pi < pieces.size() && pieces[pi].A <= x0 && x1 <= pieces[pi].B)
      p = &pieces[pi];
    if (!p) {
      add_seg(x0, x1, ev0, ev1, own, {});
      continue;
    }
    Length pv = p->v;
    if (ev0 >= pv && ev1 >= pv) {
      std::vector<int> co;
      if (ev0 == pv && ev1 == pv) co.push_back(p->owner);
      add_seg(x0, x1, ev0, ev1, own, std::move(co));
    } else if (ev0 <= pv && ev1 <= pv) {
      add_seg(x0, x1, pv, pv, p->owner, {});
    } else if (ev0 > pv) {
      // Falling envelope meets the plateau once.
      Length xc = x0 + (ev0 - pv);
      add_seg(x0, xc, ev0, pv, own, {});
      add_seg(xc, x1, pv, pv, p->owner, {});
    } else {
      // Rising envelope leaves the plateau once.
      Length xc = x0 + (pv - ev0);
      add_seg(x0, xc, pv, pv, p->owner, {});
      add_seg(xc, x1, pv, ev1, own, {});
    }
  }

  CyclicEnvelope h;
  h.circumference = C;
  if (segs.front().x0 != 0 || segs.back().x1 != C ||
      segs.back().v1 != segs.front().v0)
    throw std::logic_error("pass-two envelope does not close");
  for (const Seg& s : segs) {
    h.xs.push_back(s.x0);
    h.vs.push_back(s.v0);
    h.owner.push_back(s.own);
    h.co.push_back(s.co);
  }

  TwoPassResult out;
  out.H = rotate_cyclic(h, mod(org));
  out.Hp = rotate_cyclic(hp, mod(org));
  out.steps = sweep.steps;
  return out;
}

}  // namespace spfar

#pragma once

namespace spfar {

/// Global probe counter: incremented on every elementary search step
/// (binary-search probe, cascade hop, envelope-walk step).  Queries are
/// expected to stay within k + c*log2(n) probes.
inline thread_local long long g_probes = 0;

inline void probe(long long n = 1) { g_probes += n; }

/// Measures probes spent within a scope.
struct ProbeScope {
  long long start;
  ProbeScope() : start(g_probes) {}
  long long used() const { return g_probes - start; }
};

}  // namespace spfar

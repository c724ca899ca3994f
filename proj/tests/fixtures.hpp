#pragma once

#include <sstream>

#include "spfar/network.hpp"

// Named fixture networks used across the test suites.
namespace fixtures {

inline spfar::Network from_text(const char* text) {
  std::istringstream in(text);
  return spfar::read_network(in);
}

// Two-path network: u=0, v=1, x=2; uv:2, ux:3, xv:3.
inline spfar::Network pp1() {
  return from_text("3 3\n0 1 2\n0 2 3\n2 1 3\n");
}

// Cycle a-b-c-d-a (0..3) all weight 1; arc a-e-b with ae:1.5, eb:1.5 (e=4).
inline spfar::Network bc1() {
  return from_text("5 6\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n0 4 1.5\n4 1 1.5\n");
}

// Cycle a-b:5, b-c:1, c-d:1, d-a:1; arc a-f-b with af:3, fb:3 (overlong).
inline spfar::Network bc2() {
  return from_text("5 6\n0 1 5\n1 2 1\n2 3 1\n3 0 1\n0 4 3\n4 1 3\n");
}

// PP1 plus arc u-y-x with uy:2.5, yx:2.5 (y=3).
inline spfar::Network ab1() {
  return from_text("4 5\n0 1 2\n0 2 3\n2 1 3\n0 3 2.5\n3 2 2.5\n");
}

// uv:10, ua:2, ab:1.5, bv:1.5, ac:2, cv:2 (u=0, v=1, a=2, b=3, c=4).
inline spfar::Network sp1() {
  return from_text("5 6\n0 1 10\n0 2 2\n2 3 1.5\n3 1 1.5\n2 4 2\n4 1 2\n");
}

}  // namespace fixtures

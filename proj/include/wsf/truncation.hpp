#pragma once

#include <vector>

#include "wsf/network.hpp"
#include "wsf/profile.hpp"

namespace wsf::net {

// Finite network on levels 0..depth of a profile plus a single extra vertex
// absorbing everything beyond. Vertex names are child-index paths ("" for
// the root, "0", "0.1", ...); the extra vertex is named "@". Level-k edges
// carry conductance 1/r_k; every level-`depth` vertex is tied to "@" with
// conductance 1/(|T_depth| L_depth), the effective conductance to infinity
// of its hanging subtree, so walk functionals on the truncation agree
// exactly with the infinite tree down to level `depth`.
struct WiredTruncation {
  FiniteNetwork network;
  int depth = 0;
  int boundary = 0;                 // vertex index of "@"
  std::vector<int> level_of;        // per vertex; boundary gets depth+1
  std::vector<int> tree_edges;      // level 1..depth edges, level-major, parents in level order
  std::vector<int> boundary_edges;  // one per level-`depth` vertex, in level order
};

WiredTruncation truncate_wired(const SphericalProfile& profile, int depth);

}  // namespace wsf::net

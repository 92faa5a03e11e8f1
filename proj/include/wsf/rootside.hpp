#pragma once

#include "wsf/potential.hpp"
#include "wsf/profile.hpp"

namespace wsf::sampler {

// The part of the tree left when the subtree below a level-`edge_level`
// vertex x is removed, rooted at x's parent y: a spine of x's ancestors
// (y = spine vertex 0, the tree root = spine vertex edge_level-1) with
// b_{m+1}-1 untouched subtrees ("bushes") hanging off the spine vertex at
// tree level m. Hitting and escape probabilities come from the one-pass
// effective-conductance recursion along the spine; inside bushes they are
// the unmodified whole-tree quantities.
class RootSideTree {
 public:
  RootSideTree(const net::SphericalProfile& profile, int edge_level);

  int spine_length() const { return edge_level_; }       // spine vertices u_0..u_{len-1}
  int tree_level(int j) const { return edge_level_ - 1 - j; }
  int bush_count(int j) const;                            // bushes at u_j
  int bush_root_level(int j) const { return tree_level(j) + 1; }

  // Conductance from u_j to infinity through its own side (bushes and the
  // deeper spine), never through y's parent-free direction; 0 when that side
  // is finite.
  double down_conductance(int j) const { return g_down_[std::size_t(j)]; }

  // Total escape conductance from y within this tree; beta_y equals
  // escape/(escape + 1/r_edge) against the removed edge.
  double escape_conductance() const;

  // Open probability of the spine edge u_j -> u_{j+1} under the percolation
  // factor: P(walk from u_{j+1} ever hits u_j) = 1/(1 + r * g_down(u_{j+1})).
  double spine_open_prob(int j) const;
  // Open probability of a bush-root edge at u_j (the whole-tree p_{m+1}).
  double bush_open_prob(int j) const;

  // Harmonic-measure ray step at u_j: probability of continuing along the
  // spine; the remaining mass splits uniformly over the bushes. 0 at the
  // last spine vertex or when the deeper spine side is finite.
  double ray_spine_prob(int j) const;
  // Escape conductance from u_j over all its children here; 0 means no ray
  // continues past u_j (that side of the tree is finite).
  double ray_total_conductance(int j) const { return c_total_[std::size_t(j)]; }

  const potential::LevelTable& levels() const { return table_; }

 private:
  int edge_level_;
  potential::LevelTable table_;
  std::vector<double> g_down_;   // per spine vertex
  std::vector<double> c_spine_;  // conductance to infinity via the deeper spine
  std::vector<double> c_bush_;   // conductance to infinity via one bush
  std::vector<double> c_total_;  // c_spine + bush_count * c_bush
};

}  // namespace wsf::sampler

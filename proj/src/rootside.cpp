#include "wsf/rootside.hpp"

#include "wsf/error.hpp"

namespace wsf::sampler {

RootSideTree::RootSideTree(const net::SphericalProfile& profile, int edge_level)
    : edge_level_(edge_level), table_(profile) {
  if (edge_level < 1 || edge_level > profile.depth())
    fail(ErrorCode::InvalidParameter, "edge level out of range");

  // g_down computed root-up: at tree level m the bushes contribute
  // (b_{m+1}-1)/(r_{m+1} + |T_{m+1}| L_{m+1}) and the deeper spine (toward
  // the tree root) contributes through the level-m edge in series.
  std::vector<double> g_at_level(std::size_t(edge_level), 0.0);  // index = tree level m
  for (int m = 0; m < edge_level; ++m) {
    double g = double(table_.branching(m + 1) - 1) /
               (table_.resistance(m + 1) + table_.size(m + 1) * table_.L(m + 1));
    if (m >= 1) {
      double g_prev = g_at_level[std::size_t(m - 1)];
      g += g_prev / (1.0 + table_.resistance(m) * g_prev);
    }
    g_at_level[std::size_t(m)] = g;
  }

  g_down_.resize(std::size_t(edge_level));
  c_spine_.resize(std::size_t(edge_level));
  c_bush_.resize(std::size_t(edge_level));
  c_total_.resize(std::size_t(edge_level));
  for (int j = 0; j < edge_level; ++j) {
    int m = tree_level(j);
    g_down_[std::size_t(j)] = g_at_level[std::size_t(m)];
    c_bush_[std::size_t(j)] =
        1.0 / (table_.resistance(m + 1) + table_.size(m + 1) * table_.L(m + 1));
    double cs = 0.0;
    if (m >= 1) {
      double g_prev = g_at_level[std::size_t(m - 1)];
      cs = g_prev / (1.0 + table_.resistance(m) * g_prev);
    }
    c_spine_[std::size_t(j)] = cs;
    c_total_[std::size_t(j)] = cs + double(bush_count(j)) * c_bush_[std::size_t(j)];
  }
}

int RootSideTree::bush_count(int j) const { return table_.branching(tree_level(j) + 1) - 1; }

double RootSideTree::escape_conductance() const { return c_total_[0]; }

double RootSideTree::spine_open_prob(int j) const {
  if (j < 0 || j + 1 >= edge_level_) fail(ErrorCode::InvalidParameter, "no spine edge there");
  // Edge between u_j (tree level m) and u_{j+1} (tree level m-1) is the tree's
  // level-m edge; the walk from u_{j+1} hits u_j unless it escapes below.
  int m = tree_level(j);
  return 1.0 / (1.0 + table_.resistance(m) * g_down_[std::size_t(j + 1)]);
}

double RootSideTree::bush_open_prob(int j) const { return table_.p(tree_level(j) + 1); }

double RootSideTree::ray_spine_prob(int j) const {
  double total = c_total_[std::size_t(j)];
  if (total <= 0.0) return 0.0;
  return c_spine_[std::size_t(j)] / total;
}

}  // namespace wsf::sampler

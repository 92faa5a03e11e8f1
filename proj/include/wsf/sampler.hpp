#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsf/component.hpp"
#include "wsf/network.hpp"
#include "wsf/profile.hpp"
#include "wsf/rng.hpp"
#include "wsf/truncation.hpp"

namespace wsf::sampler {

using net::ComponentSample;
using net::FiniteNetwork;
using net::SphericalProfile;

// Edge statuses over a network's edge list, index-aligned with it.
struct EdgeConfig {
  std::vector<std::uint8_t> status;  // 1 = present
  int present_count() const;
};

bool is_spanning_tree(const FiniteNetwork& network, const std::vector<std::uint8_t>& status);

// Weighted uniform spanning tree by loop-erased random walks. The sweep
// order is fixed: vertices in input order (for wired truncations this is
// breadth-first from the tree root), each walking until it hits the current
// tree; one uniform draw per step, neighbors scanned in incident-edge input
// order. Determinism per seed depends on this exact order.
EdgeConfig wilson_ust(const FiniteNetwork& network, int root, const RngSeed& seed);
EdgeConfig wilson_ust(const FiniteNetwork& network, const std::string& root, const RngSeed& seed);

// Spanning tree of the wired truncation rooted at the boundary vertex; the
// tree-edge statuses are exactly the law of the infinite-tree spanning
// forest restricted to the first `depth` levels.
struct WiredSample {
  net::WiredTruncation truncation;
  std::vector<std::uint8_t> tree_status;      // aligned with truncation.tree_edges
  std::vector<std::uint8_t> boundary_status;  // aligned with truncation.boundary_edges
};

WiredSample wsf_truncated(const SphericalProfile& profile, int depth, const RngSeed& seed);

// Root component of wsf_truncated(profile, wired_depth) restricted to levels
// <= depth, computed without materializing the truncation: only the walks
// started at vertices of levels <= depth are run (in the same sweep order,
// consuming the same draws), which already determines every level-<= depth
// edge status. Bit-identical to the materialized construction at equal seed.
ComponentSample wsf_root_component(const SphericalProfile& profile, int wired_depth, int depth,
                                   const RngSeed& seed);

// Harmonic-measure ray: one uniform child choice per level.
ComponentSample ray_sample(const SphericalProfile& profile, int depth, const RngSeed& seed);

// Root component of the independent percolation with per-edge open
// probability p_n = L_n/L_{n-1}, grown breadth-first.
ComponentSample perc_component_sample(const SphericalProfile& profile, int depth, const RngSeed& seed);

// The law of the root's spanning-forest component: draw a ray (substream
// child(0)), then take the root's cluster in the percolation (child(1))
// with the ray's edges forced open. Forced edges consume no percolation
// draw; all other frontier edges draw one bernoulli each, breadth first,
// parents in path order, children ascending.
ComponentSample root_component_sample(const SphericalProfile& profile, int depth, const RngSeed& seed);

// Component pair around the edge between a level-`edge_level` vertex x and
// its parent y, conditioned on the edge's status. Child side: component of x
// in the subtree below x, levels indexed by distance from x (tree levels
// edge_level..depth). Root side: component of y in the rest of the tree,
// levels indexed by distance from y, vertices capped at tree level `depth`;
// its child ordering puts the continuation toward the tree root first, then
// the sibling bushes. Substreams: child(0) the side choice, child(1) the
// child side, child(2) the root side.
struct PairSample {
  ComponentSample child_side;
  ComponentSample root_side;
  bool ray_on_child_side = false;  // meaningful only for Present status
  double alpha = 0.0;              // the mixture weight that was used
};

PairSample conditioned_pair_sample(const SphericalProfile& profile, int edge_level,
                                   net::EdgeStatus status, int depth, const RngSeed& seed);

// Percolation component conditioned on reaching `depth`, by rejection over
// substreams child(0), child(1), ... of the given seed.
struct ConditionedSample {
  ComponentSample component;
  long rejections = 0;
  double acceptance_rate = 1.0;  // survival_to_depth(profile, depth)
};

ConditionedSample survival_conditioned_perc(const SphericalProfile& profile, int depth,
                                            const RngSeed& seed, long max_attempts = 1000000);

}  // namespace wsf::sampler

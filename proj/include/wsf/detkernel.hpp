#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wsf/network.hpp"
#include "wsf/rng.hpp"

namespace wsf::detkernel {

using net::FiniteNetwork;

// Subspace of the edge space, coordinates ordered by `edges` (edge ids of
// the source network; the unit vectors chi_e are orthonormal). `spanning`
// holds the raw generating vectors as columns, `onb` an orthonormal basis
// produced by pivoted, re-orthogonalized elimination with rank threshold
// 1e-10 relative to the largest spanning-column norm.
struct EdgeSpaceBasis {
  std::vector<int> edges;
  Eigen::MatrixXd spanning;
  Eigen::MatrixXd onb;
  int dim = 0;
};

// Orthonormalize an arbitrary spanning set (columns) with the rank rule above.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& spanning);

enum class KernelTag { WsfStar, FsfCycleComplement, Conditioned };

struct Kernel {
  std::vector<int> edges;
  Eigen::MatrixXd k;  // symmetric projection Gram matrix over `edges`
  KernelTag tag = KernelTag::WsfStar;
};

struct KernelDiagnostics {
  double symmetry_error = 0.0;    // max |K - K^T|
  double idempotency_error = 0.0; // max |K^2 - K|
  double eig_min = 0.0;
  double eig_max = 0.0;
  double trace = 0.0;
};
KernelDiagnostics kernel_diagnostics(const Kernel& kernel);

// Stars: one vector per vertex, sqrt(C) weights signed by the stored edge
// orientation (+ out of the tail). Dimension |V|-1 on connected networks.
EdgeSpaceBasis star_space(const FiniteNetwork& network);

// Cycles: fundamental cycles of non-tree edges against a fixed spanning
// tree, 1/sqrt(C) weights. Dimension |E|-|V|+1.
EdgeSpaceBasis cycle_space(const FiniteNetwork& network);

enum class TransferVariant { Wsf, Fsf };

// Wsf: Gram matrix of the projection onto the star space. Fsf: Gram of the
// projection onto the orthogonal complement of the cycle space. The two
// coincide on finite connected networks.
Kernel transfer_kernel(const FiniteNetwork& network, TransferVariant variant);

// Gram matrix of the orthogonal projection onto the spanned subspace.
Kernel projection_kernel(const EdgeSpaceBasis& basis, KernelTag tag = KernelTag::Conditioned);

// det of the principal minor on `edges` (edge ids); the probability that
// all of them are present. Empty set yields 1.
double inclusion_prob(const Kernel& kernel, const std::vector<int>& edges);

// Exact determinantal sample: pick an edge proportionally to the running
// kernel diagonal, deflate, repeat dim times. Returns sorted edge ids.
std::vector<int> dpp_sample(const EdgeSpaceBasis& basis, const RngSeed& seed);

// Conditioning subspaces for one edge. Present: star & (R e)-perp, by
// null-space extraction of the e-coordinate functional on the star basis.
// Absent: (star + R e) & (R e)-perp, by projecting a spanning set of
// star + R e onto (R e)-perp and re-orthonormalizing. Both are returned in
// the coordinates of the remaining edges.
EdgeSpaceBasis condition_edge(const FiniteNetwork& network, int edge, net::EdgeStatus status);

struct SubspaceRelation {
  bool first_in_second = false;
  bool second_in_first = false;
  bool equal = false;
  int dim_gap = 0;  // dim(second) - dim(first)
  double max_residual_12 = 0.0;
  double max_residual_21 = 0.0;
};

// Containment within residual 1e-8 per basis vector; CoordinateMismatch if
// the two bases index different edge lists.
SubspaceRelation subspace_compare(const EdgeSpaceBasis& h1, const EdgeSpaceBasis& h2);

// Brute-force weighted spanning tree enumeration (|E| <= 24).
struct TreeDistribution {
  int edge_count = 0;
  std::vector<std::uint32_t> trees;  // edge bitmasks
  std::vector<double> prob;          // weight / total_weight
  double total_weight = 0.0;

  double marginal(int e) const;
  double pair_marginal(int e, int f) const;
  // P(f present | e has the given status); DegenerateConditioning when the
  // conditioning event has probability zero.
  double conditional_marginal(int f, int e, bool e_present) const;
};

TreeDistribution enumerate_spanning_trees(const FiniteNetwork& network);

}  // namespace wsf::detkernel

#include "wsf/detkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "wsf/error.hpp"

namespace wsf::detkernel {

namespace {

constexpr double kRankTol = 1e-10;

std::vector<int> all_edge_ids(const FiniteNetwork& network) {
  std::vector<int> ids(std::size_t(network.edge_count()));
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

int edge_position(const Kernel& kernel, int e) {
  auto it = std::lower_bound(kernel.edges.begin(), kernel.edges.end(), e);
  if (it == kernel.edges.end() || *it != e)
    fail(ErrorCode::InvalidInput, "edge not in the kernel's edge list");
  return int(it - kernel.edges.begin());
}

}  // namespace

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& spanning) {
  Eigen::Index rows = spanning.rows(), cols = spanning.cols();
  Eigen::MatrixXd work = spanning;
  Eigen::MatrixXd basis(rows, std::min(rows, cols));
  double max_norm = 0.0;
  for (Eigen::Index j = 0; j < cols; ++j) max_norm = std::max(max_norm, work.col(j).norm());
  double tol = kRankTol * max_norm;
  std::vector<char> used(std::size_t(cols), 0);
  Eigen::Index rank = 0;
  while (rank < std::min(rows, cols)) {
    Eigen::Index pivot = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (used[std::size_t(j)]) continue;
      double nrm = work.col(j).norm();
      if (nrm > best) {
        best = nrm;
        pivot = j;
      }
    }
    if (pivot < 0) break;
    used[std::size_t(pivot)] = 1;
    Eigen::VectorXd v = work.col(pivot);
    // two re-orthogonalization passes against the accepted basis
    for (int pass = 0; pass < 2 && rank > 0; ++pass)
      v -= basis.leftCols(rank) * (basis.leftCols(rank).transpose() * v);
    double nrm = v.norm();
    if (nrm <= tol) continue;
    v /= nrm;
    basis.col(rank) = v;
    ++rank;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!used[std::size_t(j)]) work.col(j) -= v * v.dot(work.col(j));
  }
  return basis.leftCols(rank);
}

KernelDiagnostics kernel_diagnostics(const Kernel& kernel) {
  KernelDiagnostics d;
  const Eigen::MatrixXd& k = kernel.k;
  d.symmetry_error = (k - k.transpose()).cwiseAbs().maxCoeff();
  d.idempotency_error = (k * k - k).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (k + k.transpose()));
  d.eig_min = es.eigenvalues().minCoeff();
  d.eig_max = es.eigenvalues().maxCoeff();
  d.trace = k.trace();
  return d;
}

EdgeSpaceBasis star_space(const FiniteNetwork& network) {
  EdgeSpaceBasis basis;
  basis.edges = all_edge_ids(network);
  basis.spanning = Eigen::MatrixXd::Zero(network.edge_count(), network.vertex_count());
  for (int e = 0; e < network.edge_count(); ++e) {
    const net::Edge& ed = network.edge(e);
    double w = std::sqrt(ed.conductance);
    basis.spanning(e, ed.tail) = w;
    basis.spanning(e, ed.head) = -w;
  }
  basis.onb = orthonormalize(basis.spanning);
  basis.dim = int(basis.onb.cols());
  return basis;
}

EdgeSpaceBasis cycle_space(const FiniteNetwork& network) {
  EdgeSpaceBasis basis;
  basis.edges = all_edge_ids(network);
  int vcount = network.vertex_count();
  // spanning tree in edge input order
  std::vector<int> comp(static_cast<std::size_t>(vcount));
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](int v) {
    while (comp[std::size_t(v)] != v) {
      comp[std::size_t(v)] = comp[std::size_t(comp[std::size_t(v)])];
      v = comp[std::size_t(v)];
    }
    return v;
  };
  std::vector<char> in_tree(std::size_t(network.edge_count()), 0);
  std::vector<int> chords;
  for (int e = 0; e < network.edge_count(); ++e) {
    int a = find(network.edge(e).tail), b = find(network.edge(e).head);
    if (a == b) {
      chords.push_back(e);
    } else {
      comp[std::size_t(a)] = b;
      in_tree[std::size_t(e)] = 1;
    }
  }
  // parent pointers from vertex 0 through tree edges
  std::vector<int> parent_edge(static_cast<std::size_t>(vcount), -1), depth(static_cast<std::size_t>(vcount), 0);
  std::queue<int> bfs;
  bfs.push(0);
  std::vector<char> seen(std::size_t(vcount), 0);
  seen[0] = 1;
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int e : network.incident_edges(v)) {
      if (!in_tree[std::size_t(e)]) continue;
      int w = network.other_end(e, v);
      if (seen[std::size_t(w)]) continue;
      seen[std::size_t(w)] = 1;
      parent_edge[std::size_t(w)] = e;
      depth[std::size_t(w)] = depth[std::size_t(v)] + 1;
      bfs.push(w);
    }
  }

  basis.spanning = Eigen::MatrixXd::Zero(network.edge_count(), Eigen::Index(chords.size()));
  for (std::size_t ci = 0; ci < chords.size(); ++ci) {
    int e = chords[ci];
    const net::Edge& ed = network.edge(e);
    basis.spanning(e, Eigen::Index(ci)) = 1.0 / std::sqrt(ed.conductance);
    // close the cycle with the tree path head -> tail
    int a = ed.head, b = ed.tail;
    auto climb = [&](int v, double sign_towards_root) {
      int f = parent_edge[std::size_t(v)];
      const net::Edge& fe = network.edge(f);
      // traversing v -> parent(v): positive if that matches the stored orientation
      double s = fe.tail == v ? 1.0 : -1.0;
      basis.spanning(f, Eigen::Index(ci)) += sign_towards_root * s / std::sqrt(fe.conductance);
      return network.other_end(f, v);
    };
    while (depth[std::size_t(a)] > depth[std::size_t(b)]) a = climb(a, 1.0);
    while (depth[std::size_t(b)] > depth[std::size_t(a)]) b = climb(b, -1.0);
    while (a != b) {
      a = climb(a, 1.0);
      b = climb(b, -1.0);
    }
  }
  basis.onb = orthonormalize(basis.spanning);
  basis.dim = int(basis.onb.cols());
  return basis;
}

Kernel projection_kernel(const EdgeSpaceBasis& basis, KernelTag tag) {
  Kernel kernel;
  kernel.edges = basis.edges;
  kernel.k = basis.onb * basis.onb.transpose();
  kernel.tag = tag;
  return kernel;
}

Kernel transfer_kernel(const FiniteNetwork& network, TransferVariant variant) {
  if (variant == TransferVariant::Wsf)
    return projection_kernel(star_space(network), KernelTag::WsfStar);
  EdgeSpaceBasis cyc = cycle_space(network);
  Kernel kernel;
  kernel.edges = cyc.edges;
  kernel.k = Eigen::MatrixXd::Identity(network.edge_count(), network.edge_count()) -
             cyc.onb * cyc.onb.transpose();
  kernel.tag = KernelTag::FsfCycleComplement;
  return kernel;
}

double inclusion_prob(const Kernel& kernel, const std::vector<int>& edges) {
  if (edges.empty()) return 1.0;
  std::vector<int> pos;
  for (int e : edges) pos.push_back(edge_position(kernel, e));
  std::vector<int> dedup = pos;
  std::sort(dedup.begin(), dedup.end());
  if (std::adjacent_find(dedup.begin(), dedup.end()) != dedup.end())
    fail(ErrorCode::InvalidInput, "duplicate edge in inclusion query");
  Eigen::MatrixXd minor(Eigen::Index(pos.size()), Eigen::Index(pos.size()));
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = 0; j < pos.size(); ++j)
      minor(Eigen::Index(i), Eigen::Index(j)) = kernel.k(pos[i], pos[j]);
  return minor.determinant();
}

std::vector<int> dpp_sample(const EdgeSpaceBasis& basis, const RngSeed& seed) {
  RandomStream stream(seed);
  Eigen::MatrixXd k = basis.onb * basis.onb.transpose();
  Eigen::Index m = k.rows();
  std::vector<char> chosen(std::size_t(m), 0);
  std::vector<int> picks;
  for (int step = 0; step < basis.dim; ++step) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
      if (!chosen[std::size_t(j)]) total += std::max(k(j, j), 0.0);
    if (total < 1e-12)
      fail(ErrorCode::NumericalDegeneracy, "kernel diagonal exhausted before the dimension");
    double u = stream.uniform01() * total;
    Eigen::Index pick = -1;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (chosen[std::size_t(j)]) continue;
      double dj = std::max(k(j, j), 0.0);
      if (dj <= 0.0) continue;
      pick = j;
      acc += dj;
      if (u < acc) break;
    }
    chosen[std::size_t(pick)] = 1;
    picks.push_back(int(pick));
    k -= (k.col(pick) * k.row(pick)) / k(pick, pick);
  }
  std::sort(picks.begin(), picks.end());
  std::vector<int> out;
  for (int j : picks) out.push_back(basis.edges[std::size_t(j)]);
  return out;
}

EdgeSpaceBasis condition_edge(const FiniteNetwork& network, int edge, net::EdgeStatus status) {
  if (edge < 0 || edge >= network.edge_count()) fail(ErrorCode::InvalidInput, "edge out of range");
  EdgeSpaceBasis star = star_space(network);
  double p_edge = star.onb.row(edge).squaredNorm();  // kernel diagonal at the edge
  Eigen::Index m = star.onb.rows();

  EdgeSpaceBasis out;
  for (int e = 0; e < network.edge_count(); ++e)
    if (e != edge) out.edges.push_back(e);

  Eigen::MatrixXd reduced;
  if (status == net::EdgeStatus::Present) {
    if (p_edge <= 1e-12)
      fail(ErrorCode::DegenerateConditioning, "edge is absent with probability one");
    // null space of the e-coordinate functional on the star basis
    Eigen::VectorXd w = star.onb.row(edge).transpose();
    Eigen::Index pivot;
    double wmax = w.cwiseAbs().maxCoeff(&pivot);
    if (wmax <= kRankTol) {
      reduced = star.onb;
    } else {
      reduced.resize(m, star.onb.cols() - 1);
      Eigen::Index at = 0;
      for (Eigen::Index j = 0; j < star.onb.cols(); ++j) {
        if (j == pivot) continue;
        reduced.col(at++) = star.onb.col(j) - (w(j) / w(pivot)) * star.onb.col(pivot);
      }
    }
  } else {
    if (p_edge >= 1.0 - 1e-12)
      fail(ErrorCode::DegenerateConditioning, "edge is present with probability one");
    // project a spanning set of star + R e onto (R e)-perp: zero the row;
    // the chi_e generator projects to zero and is dropped
    reduced = star.onb;
    reduced.row(edge).setZero();
  }

  // embed in the remaining-edge coordinates (the dropped row is zero)
  out.spanning.resize(m - 1, reduced.cols());
  Eigen::Index at = 0;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (r == edge) continue;
    out.spanning.row(at++) = reduced.row(r);
  }
  out.onb = orthonormalize(out.spanning);
  out.dim = int(out.onb.cols());
  return out;
}

SubspaceRelation subspace_compare(const EdgeSpaceBasis& h1, const EdgeSpaceBasis& h2) {
  if (h1.edges != h2.edges)
    fail(ErrorCode::CoordinateMismatch, "bases indexed by different edge lists");
  SubspaceRelation rel;
  rel.dim_gap = h2.dim - h1.dim;
  auto residual = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      Eigen::VectorXd v = a.col(j);
      Eigen::VectorXd r = v - b * (b.transpose() * v);
      worst = std::max(worst, r.norm());
    }
    return worst;
  };
  rel.max_residual_12 = residual(h1.onb, h2.onb);
  rel.max_residual_21 = residual(h2.onb, h1.onb);
  rel.first_in_second = rel.max_residual_12 <= 1e-8;
  rel.second_in_first = rel.max_residual_21 <= 1e-8;
  rel.equal = rel.first_in_second && rel.second_in_first && h1.dim == h2.dim;
  return rel;
}

double TreeDistribution::marginal(int e) const {
  double s = 0.0;
  for (std::size_t i = 0; i < trees.size(); ++i)
    if (trees[i] & (1u << e)) s += prob[i];
  return s;
}

double TreeDistribution::pair_marginal(int e, int f) const {
  std::uint32_t mask = (1u << e) | (1u << f);
  double s = 0.0;
  for (std::size_t i = 0; i < trees.size(); ++i)
    if ((trees[i] & mask) == mask) s += prob[i];
  return s;
}

double TreeDistribution::conditional_marginal(int f, int e, bool e_present) const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    bool has_e = trees[i] & (1u << e);
    if (has_e != e_present) continue;
    den += prob[i];
    if (trees[i] & (1u << f)) num += prob[i];
  }
  if (den <= 0.0) fail(ErrorCode::DegenerateConditioning, "conditioning event has probability zero");
  return num / den;
}

TreeDistribution enumerate_spanning_trees(const FiniteNetwork& network) {
  int ecount = network.edge_count(), vcount = network.vertex_count();
  if (ecount > 24) fail(ErrorCode::EnumerationTooLarge, "enumeration capped at 24 edges");
  TreeDistribution dist;
  dist.edge_count = ecount;
  std::vector<double> weights;

  std::vector<int> comp(static_cast<std::size_t>(vcount));
  std::iota(comp.begin(), comp.end(), 0);
  auto rec = [&](auto&& self, int idx, std::uint32_t mask, int joined, double weight,
                 std::vector<int> dsu) -> void {
    if (joined == vcount - 1) {
      dist.trees.push_back(mask);
      weights.push_back(weight);
      return;
    }
    if (ecount - idx < vcount - 1 - joined) return;  // not enough edges left
    auto find = [&dsu](int v) {
      while (dsu[std::size_t(v)] != v) {
        dsu[std::size_t(v)] = dsu[std::size_t(dsu[std::size_t(v)])];
        v = dsu[std::size_t(v)];
      }
      return v;
    };
    self(self, idx + 1, mask, joined, weight, dsu);
    int a = find(network.edge(idx).tail), b = find(network.edge(idx).head);
    if (a == b) return;
    dsu[std::size_t(a)] = b;
    self(self, idx + 1, mask | (1u << idx), joined + 1, weight * network.edge(idx).conductance,
         std::move(dsu));
  };
  rec(rec, 0, 0, 0, 1.0, comp);

  for (double w : weights) dist.total_weight += w;
  for (double w : weights) dist.prob.push_back(w / dist.total_weight);
  return dist;
}

}  // namespace wsf::detkernel

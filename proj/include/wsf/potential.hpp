#pragma once

#include <functional>
#include <vector>

#include "wsf/component.hpp"
#include "wsf/profile.hpp"

namespace wsf::potential {

using net::SphericalProfile;
using net::TreePath;

// L_n = sum_{m>n} r_m/|T_m| for n = 0..depth. values[n] carries a guaranteed
// absolute error bounds[n] (analytic tail bound plus summation rounding).
// Explicit profiles get partial sums only: tail_known = false and the bounds
// are infinite, since nothing is known beyond the stored levels.
struct TailSums {
  std::vector<double> values;
  std::vector<double> bounds;
  bool tail_known = true;
};

TailSums tail_sums(const SphericalProfile& profile);

// true iff L_0 < infinity. Explicit profiles cannot answer: MissingTailRule.
bool is_transient(const SphericalProfile& profile);

// Per-level quantities precomputed once; the samplers draw from this table
// instead of re-deriving tails per replica. Construction demands a transient
// profile (RecurrentProfile / MissingTailRule otherwise).
class LevelTable {
 public:
  explicit LevelTable(const SphericalProfile& profile);

  int depth() const { return depth_; }
  double L(int n) const { return L_[std::size_t(n)]; }
  double size(int n) const { return size_[std::size_t(n)]; }       // |T_n|, n = 0..depth
  int branching(int n) const { return b_[std::size_t(n)]; }        // b_n, n = 1..depth
  double resistance(int n) const { return r_[std::size_t(n)]; }    // r_n, n = 1..depth
  double p(int n) const { return p_[std::size_t(n)]; }             // L_n/L_{n-1}, n = 1..depth
  double h(int n) const { return L_[std::size_t(n)] / L_[0]; }

 private:
  int depth_;
  std::vector<double> L_, size_, r_, p_;
  std::vector<int> b_;
};

// h_n = L_n/L_0: the probability that the walk from a level-n vertex ever
// visits the root (harmonic value of the collapsed level chain).
double hit_root_prob(const SphericalProfile& profile, int n);

// I(x) = 1/|T_n| for any level-n vertex: equal split under spherical symmetry.
double harmonic_measure(const SphericalProfile& profile, int n);

// p_n = L_n/L_{n-1}: the probability that the walk from a level-n vertex
// ever steps to its parent; the per-edge open probability of the root
// component's percolation factor. n >= 1.
double perc_open_prob(const SphericalProfile& profile, int n);

// alpha for the edge between a level-n vertex x and its parent y, oriented
// toward the child side: beta_x/(beta_x + beta_y - beta_x beta_y) where
// beta_x = 1 - p_n and beta_y = P_y(never visit x) comes from a first-step
// solve on the ancestor chain with the sibling subtrees acting as leaks to
// infinity. n >= 1.
double alpha_split(const SphericalProfile& profile, int n);

// term_n = r_n/(|T_n|^2 L_n L_{n-1}) and its partial sums S_1..S_N; the
// series whose convergence separates the tolerance classes.
struct SeriesSums {
  std::vector<double> terms;
  std::vector<double> partial_sums;
};

SeriesSums series_partial_sums(const SphericalProfile& profile, int N);

// Unit flow on the tree given by its values theta(x) per path; validated
// lazily: theta(root) = 1 and conservation at every internal vertex.
using FlowValues = std::function<double(const TreePath&)>;

FlowValues equal_split_flow(const SphericalProfile& profile);
FlowValues single_ray_flow();

// Per-level sums sum_{|x|=n} theta(x)^2 (1/h_n - 1/h_{n-1}) for n = 1..N.
// Walks every vertex of the first N levels, so N must keep sum |T_n| small.
std::vector<double> genseries_summands(const SphericalProfile& profile, const FlowValues& theta, int N);

// Exact value of the mean of W_n under the ray-plus-percolation law:
// 1 + L_0 * S_n, evaluated through series_partial_sums so tests can compare
// bit for bit.
double expected_w(const SphericalProfile& profile, int n);

// s_n = P(percolation component reaches level n), by the exact backward
// extinction recursion over Binomial(b_k, p_k) offspring.
double survival_to_depth(const SphericalProfile& profile, int n);

enum class Tolerance { ChangeIntolerant, InsertionTolerant, Inconclusive };
enum class SeriesTest { Ratio, Polynomial, Custom, None };

inline const char* tolerance_name(Tolerance t) {
  switch (t) {
    case Tolerance::ChangeIntolerant: return "ChangeIntolerant";
    case Tolerance::InsertionTolerant: return "InsertionTolerant";
    default: return "Inconclusive";
  }
}

inline const char* series_test_name(SeriesTest t) {
  switch (t) {
    case SeriesTest::Ratio: return "ratio";
    case SeriesTest::Polynomial: return "polynomial";
    case SeriesTest::Custom: return "custom";
    default: return "none";
  }
}

struct ToleranceReport {
  Tolerance classification = Tolerance::Inconclusive;
  bool essentially_deletion_tolerant = false;
  bool transient = false;
  SeriesTest fired = SeriesTest::None;
  std::vector<double> partial_sums;  // evidence: S_1..S_N
  double tail_bound = 0.0;           // uncertainty of L_0 behind the evidence
};

// Divergence is only ever certified by an analytic test (ratio test on the
// level growth, polynomial comparison, or a custom rule's own verdict);
// partial sums alone yield Inconclusive. evidence_terms caps at the stored
// depth.
ToleranceReport classify(const SphericalProfile& profile, int evidence_terms = 32);

}  // namespace wsf::potential

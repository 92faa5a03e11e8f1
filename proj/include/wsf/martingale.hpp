#pragma once

#include <string>
#include <vector>

#include "wsf/component.hpp"
#include "wsf/profile.hpp"
#include "wsf/rng.hpp"

namespace wsf::martingale {

using net::ComponentSample;
using net::SphericalProfile;

// Sampling laws for W trajectories. Perc: percolation cluster of the root.
// RayPerc: percolation with a harmonic ray forced open (the root component
// law of the spanning forest's two-construction identity). Survival: Perc
// conditioned on reaching the target depth, by rejection.
enum class Law { Perc, RayPerc, PercConditionedSurvival };

const char* law_name(Law law);                 // "perc" / "rayperc" / "survival"
Law law_from_name(const std::string& name);    // inverse; InvalidInput otherwise

// W_n of a sampled component: |t_n| * L_0 / (|T_n| L_n), the density of the
// ray-with-percolation law against plain percolation on depth-n cylinders.
double w_value(const ComponentSample& sample, const SphericalProfile& profile, int n);

struct WTrajectory {
  Law law = Law::Perc;
  std::vector<double> w;  // W_0 .. W_depth
};

// Exhaustive check of the density identity on the first `depth` levels:
// enumerates every rooted subtree t, computes RayPerc([t]), Perc([t]) and
// W_depth(t) by independent recursions, and returns the largest absolute
// error over both
//   max_t |RayPerc([t]) - W_depth(t) * Perc([t])|
//   max_{n<=depth, s} |E_Perc[W_n | s] - W_{n-1}(s)|.
// Exact integer fractions are used for the unit-resistance binary rule
// (every weight is dyadic); doubles otherwise. Budget: 5e5 subtrees.
double rn_identity_check(const SphericalProfile& profile, int depth);

struct LevelSummary {
  double mean = 0.0;
  double se_mean = 0.0;  // standard error of the mean
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct TrajectoryBatch {
  Law law = Law::Perc;
  int depth = 0;
  std::vector<WTrajectory> trajectories;
  std::vector<LevelSummary> levels;  // [0..depth]
};

// Replica r uses substream seed.child(r); generation is parallel across
// replicas, the output is deterministic in the seed regardless.
TrajectoryBatch trajectory_batch(const SphericalProfile& profile, int depth, long replicas,
                                 Law law, const RngSeed& seed);

// Heuristic growth-vs-boundedness reading of RayPerc trajectories. The
// verdict compares the fitted median slope against the slope of the exact
// expectation curve on the window [depth/2, depth]:
// CONSISTENT-WITH-DIVERGENCE iff slope_expected >= 0.05 and
// slope_median >= max(0.01, 0.25 * slope_expected); otherwise
// CONSISTENT-WITH-BOUNDEDNESS. Survival-law trajectories, when present,
// contribute lower quantiles of W_depth (evidence that W stays positive).
struct DiagnosisReport {
  int depth = 0;
  long replicas = 0;  // RayPerc trajectories used
  std::vector<double> mean_w;          // per level, RayPerc
  std::vector<double> median_w;        // per level, RayPerc
  std::vector<double> expected_curve;  // exact E[W_n] per level
  double slope_median = 0.0;
  double slope_expected = 0.0;
  std::string verdict;       // CONSISTENT-WITH-DIVERGENCE / CONSISTENT-WITH-BOUNDEDNESS
  bool heuristic = true;     // never proof; the series classifier is normative
  std::vector<double> survival_quantile_levels;  // {0.01, 0.05, 0.10, 0.25}
  std::vector<double> survival_w_quantiles;      // W_depth quantiles under the survival law
};

DiagnosisReport tolerance_diagnosis(const std::vector<WTrajectory>& trajectories,
                                    const SphericalProfile& profile);

}  // namespace wsf::martingale

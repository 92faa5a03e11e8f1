#include "wsf/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "wsf/error.hpp"
#include "wsf/potential.hpp"
#include "wsf/sampler.hpp"
#include "wsf/util.hpp"

namespace wsf::martingale {

const char* law_name(Law law) {
  switch (law) {
    case Law::Perc: return "perc";
    case Law::RayPerc: return "rayperc";
    case Law::PercConditionedSurvival: return "survival";
  }
  return "?";
}

Law law_from_name(const std::string& name) {
  if (name == "perc") return Law::Perc;
  if (name == "rayperc") return Law::RayPerc;
  if (name == "survival") return Law::PercConditionedSurvival;
  fail(ErrorCode::InvalidInput, "unknown law '" + name + "'");
}

double w_value(const ComponentSample& sample, const SphericalProfile& profile, int n) {
  if (n < 0 || n > sample.depth()) fail(ErrorCode::InvalidParameter, "level out of range");
  potential::LevelTable table(profile);
  if (n == 0) return 1.0;
  return double(sample.cardinality(n)) * table.L(0) / (table.size(n) * table.L(n));
}

namespace {

// Exact fraction on int64; every weight that appears for the binary rule is
// dyadic with tiny exponents, so no overflow handling is needed.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long n, long long d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    return {n, d};
  }
  Rational operator*(const Rational& o) const { return of(num * o.num, den * o.den); }
  Rational operator+(const Rational& o) const { return of(num * o.den + o.num * den, den * o.den); }
  Rational operator-(const Rational& o) const { return of(num * o.den - o.num * den, den * o.den); }
  Rational scaled(long long k) const { return of(num * k, den); }
  double value() const { return double(num) / double(den); }
};

inline double weight_value(const Rational& r) { return r.value(); }
inline double weight_value(double x) { return x; }
inline Rational weight_scaled(const Rational& r, long long k) { return r.scaled(k); }
inline double weight_scaled(double x, long long k) { return x * double(k); }

template <class W>
struct LevelData {
  std::vector<int> b;       // branching, 1-indexed
  std::vector<W> p, q, invb, c;  // open prob, closed prob, 1/b, L0/(|T_n| L_n); c[0] = 1
};

LevelData<Rational> exact_binary_levels(int depth) {
  LevelData<Rational> d;
  d.b.assign(std::size_t(depth) + 1, 2);
  d.p.assign(std::size_t(depth) + 1, Rational{1, 2});
  d.q.assign(std::size_t(depth) + 1, Rational{1, 2});
  d.invb.assign(std::size_t(depth) + 1, Rational{1, 2});
  d.c.assign(std::size_t(depth) + 1, Rational{1, 1});  // |T_n| L_n = 1 for unit resistances
  return d;
}

LevelData<double> float_levels(const potential::LevelTable& t, int depth) {
  LevelData<double> d;
  d.b.assign(1, 1);
  d.p.assign(1, 1.0);
  d.q.assign(1, 0.0);
  d.invb.assign(1, 1.0);
  d.c.assign(1, 1.0);
  for (int n = 1; n <= depth; ++n) {
    d.b.push_back(t.branching(n));
    d.p.push_back(t.p(n));
    d.q.push_back(1.0 - t.p(n));
    d.invb.push_back(1.0 / double(t.branching(n)));
    d.c.push_back(t.L(0) / (t.size(n) * t.L(n)));
  }
  return d;
}

template <class W>
struct Option {
  W a;             // Perc weight of the subtree below one vertex
  W r;             // same with a forced ray through it, ray choices weighted 1/b
  long long cnt;   // vertices at the bottom level
};

// All child configurations of one vertex whose children live at `level`:
// each child is absent (factor q) or carries one of its own options (factor
// p*a); r tracks the assignments with exactly one ray among the children.
template <class W, class F>
void child_combos(const std::vector<Option<W>>& opts, const LevelData<W>& d, int level, int i,
                  W apart, W rpart, long long cnt, F&& emit) {
  if (i == d.b[std::size_t(level)]) {
    emit(apart, rpart, cnt);
    return;
  }
  child_combos(opts, d, level, i + 1, apart * d.q[std::size_t(level)],
               rpart * d.q[std::size_t(level)], cnt, emit);
  for (const Option<W>& o : opts) {
    W pa = d.p[std::size_t(level)] * o.a;
    child_combos(opts, d, level, i + 1, apart * pa,
                 rpart * pa + apart * (d.invb[std::size_t(level)] * o.r), cnt + o.cnt, emit);
  }
}

double subtree_budget(const LevelData<double>& d, int depth) {
  double g = 1.0;
  for (int k = depth - 1; k >= 0; --k) {
    g = std::pow(1.0 + g, double(d.b[std::size_t(k) + 1]));
    if (g > 1e18) return g;
  }
  return g;
}

template <class W>
double identity_errors(const LevelData<W>& d, int depth) {
  if (depth == 0) return 0.0;
  W unit = d.c[0];  // c[0] = 1 by construction in both weight types
  // memo[k]: options of a single vertex at level k (1 <= k <= depth)
  std::vector<std::vector<Option<W>>> memo(std::size_t(depth) + 1);
  memo[std::size_t(depth)] = {{unit, unit, 1}};
  double max_err = 0.0;
  for (int k = depth - 1; k >= 0; --k) {
    auto emit_store = [&](const W& a, const W& r, long long cnt) {
      memo[std::size_t(k)].push_back({a, r, cnt});
    };
    auto emit_check = [&](const W& a, const W& r, long long cnt) {
      W werr = r - weight_scaled(d.c[std::size_t(depth)] * a, cnt);
      max_err = std::max(max_err, std::abs(weight_value(werr)));
    };
    if (k >= 1)
      child_combos(memo[std::size_t(k) + 1], d, k + 1, 0, unit, W{}, 0, emit_store);
    else
      child_combos(memo[1], d, 1, 0, unit, W{}, 0, emit_check);
  }
  return max_err;
}

template <class W>
double martingale_errors(const LevelData<W>& d, int depth) {
  // E[W_n | s] versus W_{n-1}(s) for every subtree s of the first n-1
  // levels; the conditional expectation sums the binomial child counts
  // explicitly.
  double max_err = 0.0;
  W unit = d.c[0];  // alias: c[0] = 1 by construction in both paths
  for (int n = 1; n <= depth; ++n) {
    int b = d.b[std::size_t(n)];
    std::vector<long long> binom(std::size_t(b) + 1, 0);
    binom[0] = 1;
    for (int i = 1; i <= b; ++i)
      for (int j = i; j >= 1; --j) binom[std::size_t(j)] += binom[std::size_t(j) - 1];
    W mean_kept{};  // sum_k C(b,k) p^k q^(b-k) k
    for (int k = 1; k <= b; ++k) {
      W term = unit;
      for (int i = 0; i < k; ++i) term = term * d.p[std::size_t(n)];
      for (int i = 0; i < b - k; ++i) term = term * d.q[std::size_t(n)];
      mean_kept = mean_kept + weight_scaled(term, binom[std::size_t(k)] * k);
    }
    // enumerate subtrees of depth n-1 and compare per subtree
    std::vector<std::vector<Option<W>>> memo(static_cast<std::size_t>(n));
    std::vector<Option<W>> base = {{unit, unit, 1}};
    auto check = [&](const W&, const W&, long long cnt) {
      W lhs = weight_scaled(mean_kept * d.c[std::size_t(n)], cnt);
      W rhs = weight_scaled(d.c[std::size_t(n) - 1], cnt);
      max_err = std::max(max_err, std::abs(weight_value(lhs - rhs)));
    };
    if (n == 1) {
      check(unit, unit, 1);
      continue;
    }
    memo[std::size_t(n) - 1] = base;
    for (int k = n - 2; k >= 1; --k) {
      auto emit_store = [&](const W& a, const W& r, long long cnt) {
        memo[std::size_t(k)].push_back({a, r, cnt});
      };
      child_combos(memo[std::size_t(k) + 1], d, k + 1, 0, unit, W{}, 0, emit_store);
    }
    child_combos(memo[1], d, 1, 0, unit, W{}, 0, check);
  }
  return max_err;
}

}  // namespace

double rn_identity_check(const SphericalProfile& profile, int depth) {
  if (depth < 0 || depth > profile.depth()) fail(ErrorCode::InvalidParameter, "depth out of range");
  potential::LevelTable table(profile);  // transience gate
  LevelData<double> fd = float_levels(table, depth);
  if (subtree_budget(fd, depth) > 5.0e5)
    fail(ErrorCode::EnumerationTooLarge, "too many depth-limited subtrees");
  if (profile.rule() == net::ProfileRule::Binary) {
    LevelData<Rational> ed = exact_binary_levels(depth);
    return std::max(identity_errors(ed, depth), martingale_errors(ed, depth));
  }
  return std::max(identity_errors(fd, depth), martingale_errors(fd, depth));
}

TrajectoryBatch trajectory_batch(const SphericalProfile& profile, int depth, long replicas,
                                 Law law, const RngSeed& seed) {
  if (replicas < 1) fail(ErrorCode::InvalidParameter, "need at least one replica");
  if (depth < 0 || depth > profile.depth()) fail(ErrorCode::InvalidParameter, "depth out of range");
  potential::LevelTable table(profile);
  std::vector<double> scale(std::size_t(depth) + 1, 1.0);
  for (int n = 1; n <= depth; ++n) scale[std::size_t(n)] = table.L(0) / (table.size(n) * table.L(n));
  if (law == Law::PercConditionedSurvival && potential::survival_to_depth(profile, depth) <= 0.0)
    fail(ErrorCode::ZeroSurvival, "survival probability is zero at this depth");

  TrajectoryBatch batch;
  batch.law = law;
  batch.depth = depth;
  batch.trajectories.assign(std::size_t(replicas), WTrajectory{law, {}});

  std::exception_ptr first_error;
  std::mutex error_lock;
  auto worker = [&](long lo, long hi) {
    try {
      for (long r = lo; r < hi; ++r) {
        RngSeed sub = seed.child(std::uint32_t(r));
        ComponentSample comp = [&] {
          switch (law) {
            case Law::Perc: return sampler::perc_component_sample(profile, depth, sub);
            case Law::RayPerc: return sampler::root_component_sample(profile, depth, sub);
            case Law::PercConditionedSurvival:
              return std::move(sampler::survival_conditioned_perc(profile, depth, sub).component);
          }
          fail(ErrorCode::InvalidParameter, "unknown law");
        }();
        std::vector<double>& w = batch.trajectories[std::size_t(r)].w;
        w.resize(std::size_t(depth) + 1);
        for (int n = 0; n <= depth; ++n)
          w[std::size_t(n)] = double(comp.cardinality(n)) * scale[std::size_t(n)];
      }
    } catch (...) {
      std::lock_guard<std::mutex> hold(error_lock);
      if (!first_error) first_error = std::current_exception();
    }
  };

  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  long threads = std::min<long>(std::min(hw, 8u), replicas);
  if (replicas < 2000) threads = 1;
  if (threads <= 1) {
    worker(0, replicas);
  } else {
    std::vector<std::thread> pool;
    long chunk = (replicas + threads - 1) / threads;
    for (long t = 0; t < threads; ++t)
      pool.emplace_back(worker, t * chunk, std::min(replicas, (t + 1) * chunk));
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  batch.levels.resize(std::size_t(depth) + 1);
  std::vector<double> col(static_cast<std::size_t>(replicas));
  for (int n = 0; n <= depth; ++n) {
    CompensatedSum mean_acc;
    for (long r = 0; r < replicas; ++r) {
      col[std::size_t(r)] = batch.trajectories[std::size_t(r)].w[std::size_t(n)];
      mean_acc.add(col[std::size_t(r)]);
    }
    double mean = mean_acc.value() / double(replicas);
    CompensatedSum var_acc;
    for (double x : col) var_acc.add((x - mean) * (x - mean));
    double se = replicas > 1 ? std::sqrt(var_acc.value() / (double(replicas) * double(replicas - 1)))
                             : 0.0;
    std::sort(col.begin(), col.end());
    LevelSummary& s = batch.levels[std::size_t(n)];
    s.mean = mean;
    s.se_mean = se;
    s.median = quantile_sorted(col, 0.5);
    s.q25 = quantile_sorted(col, 0.25);
    s.q75 = quantile_sorted(col, 0.75);
  }
  return batch;
}

DiagnosisReport tolerance_diagnosis(const std::vector<WTrajectory>& trajectories,
                                    const SphericalProfile& profile) {
  std::vector<const WTrajectory*> ray, surv;
  for (const WTrajectory& t : trajectories) {
    if (t.law == Law::RayPerc) ray.push_back(&t);
    if (t.law == Law::PercConditionedSurvival) surv.push_back(&t);
  }
  if (ray.size() < 100) fail(ErrorCode::InsufficientData, "need at least 100 rayperc trajectories");
  int depth = int(ray[0]->w.size()) - 1;
  for (const WTrajectory* t : ray)
    if (int(t->w.size()) - 1 != depth) fail(ErrorCode::InvalidInput, "mixed trajectory depths");
  if (depth < 2) fail(ErrorCode::InsufficientData, "diagnosis needs depth >= 2");

  DiagnosisReport rep;
  rep.depth = depth;
  rep.replicas = long(ray.size());
  std::vector<double> col(ray.size());
  for (int n = 0; n <= depth; ++n) {
    CompensatedSum acc;
    for (std::size_t r = 0; r < ray.size(); ++r) {
      col[r] = ray[r]->w[std::size_t(n)];
      acc.add(col[r]);
    }
    rep.mean_w.push_back(acc.value() / double(ray.size()));
    std::sort(col.begin(), col.end());
    rep.median_w.push_back(quantile_sorted(col, 0.5));
    rep.expected_curve.push_back(potential::expected_w(profile, n));
  }

  rep.slope_median = ls_slope(rep.median_w, depth / 2, depth);
  rep.slope_expected = ls_slope(rep.expected_curve, depth / 2, depth);
  // Frozen heuristic thresholds: the expectation curve must grow, and the
  // sampled medians must track a fixed fraction of that growth.
  bool diverging = rep.slope_expected >= 0.05 &&
                   rep.slope_median >= std::max(0.01, 0.25 * rep.slope_expected);
  rep.verdict = diverging ? "CONSISTENT-WITH-DIVERGENCE" : "CONSISTENT-WITH-BOUNDEDNESS";

  if (!surv.empty()) {
    rep.survival_quantile_levels = {0.01, 0.05, 0.10, 0.25};
    std::vector<double> wd;
    for (const WTrajectory* t : surv) wd.push_back(t->w.back());
    std::sort(wd.begin(), wd.end());
    for (double q : rep.survival_quantile_levels)
      rep.survival_w_quantiles.push_back(quantile_sorted(wd, q));
  }
  return rep;
}

}  // namespace wsf::martingale

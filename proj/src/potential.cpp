#include "wsf/potential.hpp"

#include <cmath>
#include <limits>

#include "wsf/error.hpp"
#include "wsf/util.hpp"

namespace wsf::potential {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFlowTolerance = 1e-12;
constexpr double kMaxFlowVertices = 4.0e6;

double ipow(double x, int k) {
  double r = 1.0;
  for (; k > 0; k >>= 1) {
    if (k & 1) r *= x;
    x *= x;
  }
  return r;
}

void check_level(const SphericalProfile& profile, int n, int lo) {
  if (n < lo || n > profile.depth()) fail(ErrorCode::InvalidParameter, "level out of range");
}

}  // namespace

TailSums tail_sums(const SphericalProfile& profile) {
  int d = profile.depth();
  TailSums out;
  out.values.assign(std::size_t(d) + 1, 0.0);
  out.bounds.assign(std::size_t(d) + 1, kInf);

  double start = 0.0, start_bound = 0.0;
  if (profile.has_tail_rule()) {
    net::TailEstimate t = profile.tail_beyond(d);
    if (!std::isfinite(t.value)) {
      out.values.assign(std::size_t(d) + 1, kInf);
      out.bounds.assign(std::size_t(d) + 1, 0.0);
      return out;
    }
    start = t.value;
    start_bound = t.bound;
  } else {
    out.tail_known = false;  // partial sums only; bounds stay infinite
  }

  // Backward accumulation: the appended terms r_n/|T_n| grow as n decreases,
  // so the small ones are absorbed first.
  CompensatedSum acc;
  acc.add(start);
  out.values[std::size_t(d)] = start;
  if (out.tail_known) out.bounds[std::size_t(d)] = start_bound;
  for (int n = d; n >= 1; --n) {
    acc.add(profile.resistance(n) / profile.level_size(n));
    out.values[std::size_t(n - 1)] = acc.value();
    if (out.tail_known)
      out.bounds[std::size_t(n - 1)] = start_bound + 4e-16 * acc.value();
  }
  return out;
}

bool is_transient(const SphericalProfile& profile) {
  if (!profile.has_tail_rule())
    fail(ErrorCode::MissingTailRule, "finite data cannot decide transience");
  return std::isfinite(profile.tail_beyond(0).value);
}

LevelTable::LevelTable(const SphericalProfile& profile) : depth_(profile.depth()) {
  TailSums ts = tail_sums(profile);
  if (!ts.tail_known)
    fail(ErrorCode::MissingTailRule, "level table needs a tail rule");
  if (!std::isfinite(ts.values[0]))
    fail(ErrorCode::RecurrentProfile, "recurrent profile");
  L_ = std::move(ts.values);
  size_.resize(std::size_t(depth_) + 1);
  b_.assign(1, 1);
  r_.assign(1, 0.0);
  p_.assign(1, 0.0);
  for (int n = 0; n <= depth_; ++n) size_[std::size_t(n)] = profile.level_size(n);
  for (int n = 1; n <= depth_; ++n) {
    b_.push_back(profile.branching(n));
    r_.push_back(profile.resistance(n));
    p_.push_back(L_[std::size_t(n)] / L_[std::size_t(n - 1)]);
  }
}

double hit_root_prob(const SphericalProfile& profile, int n) {
  check_level(profile, n, 0);
  LevelTable t(profile);
  return t.L(n) / t.L(0);
}

double harmonic_measure(const SphericalProfile& profile, int n) {
  check_level(profile, n, 0);
  if (!is_transient(profile)) fail(ErrorCode::RecurrentProfile, "recurrent profile");
  return 1.0 / profile.level_size(n);
}

double perc_open_prob(const SphericalProfile& profile, int n) {
  check_level(profile, n, 1);
  LevelTable t(profile);
  return t.p(n);
}

double alpha_split(const SphericalProfile& profile, int n) {
  check_level(profile, n, 1);
  LevelTable t(profile);
  double beta_x = 1.0 - t.p(n);

  // v(a_m) = P(hit x) for the ancestors a_0 = root .. a_{n-1} = parent(x).
  // Sibling subtrees leak to infinity (potential 0) with conductance
  // (b_{m+1}-1)/(r_{m+1} + |T_{m+1}| L_{m+1}); the edge to x feeds
  // potential 1 into a_{n-1}.
  std::vector<double> lower(std::size_t(n), 0.0), diag(std::size_t(n), 0.0),
      upper(std::size_t(n), 0.0), rhs(std::size_t(n), 0.0);
  for (int m = 0; m < n; ++m) {
    double ground =
        double(t.branching(m + 1) - 1) / (t.resistance(m + 1) + t.size(m + 1) * t.L(m + 1));
    double d = ground;
    if (m >= 1) {
      double c = 1.0 / t.resistance(m);
      d += c;
      lower[std::size_t(m)] = -c;
      upper[std::size_t(m - 1)] = -c;
    }
    if (m <= n - 2) d += 1.0 / t.resistance(m + 1);
    if (m == n - 1) {
      d += 1.0 / t.resistance(n);
      rhs[std::size_t(m)] = 1.0 / t.resistance(n);
    }
    diag[std::size_t(m)] = d;
  }
  std::vector<double> v = solve_tridiagonal(lower, diag, upper, rhs);
  double beta_y = 1.0 - v[std::size_t(n - 1)];
  return beta_x / (beta_x + beta_y - beta_x * beta_y);
}

SeriesSums series_partial_sums(const SphericalProfile& profile, int N) {
  check_level(profile, N, 1);
  LevelTable t(profile);
  SeriesSums out;
  CompensatedSum acc;
  for (int n = 1; n <= N; ++n) {
    double sz = t.size(n);
    double term = t.resistance(n) / (sz * sz * t.L(n) * t.L(n - 1));
    acc.add(term);
    out.terms.push_back(term);
    out.partial_sums.push_back(acc.value());
  }
  return out;
}

FlowValues equal_split_flow(const SphericalProfile& profile) {
  std::vector<double> inv_size;
  for (int n = 0; n <= profile.depth(); ++n) inv_size.push_back(1.0 / profile.level_size(n));
  return [inv_size](const TreePath& path) { return inv_size.at(path.size()); };
}

FlowValues single_ray_flow() {
  return [](const TreePath& path) {
    for (int i : path)
      if (i != 0) return 0.0;
    return 1.0;
  };
}

std::vector<double> genseries_summands(const SphericalProfile& profile, const FlowValues& theta,
                                       int N) {
  check_level(profile, N, 1);
  LevelTable t(profile);
  double vertices = 0.0;
  for (int n = 0; n <= N; ++n) vertices += t.size(n);
  if (vertices > kMaxFlowVertices)
    fail(ErrorCode::EnumerationTooLarge, "flow evaluation walks too many vertices");

  std::vector<double> sq(std::size_t(N) + 1, 0.0);
  TreePath path;
  // DFS accumulating theta^2 per level and checking conservation at every
  // internal vertex.
  auto visit = [&](auto&& self, double value) -> void {
    int n = int(path.size());
    if (!std::isfinite(value)) fail(ErrorCode::NotAFlow, "flow value not finite at " + net::path_name(path));
    sq[std::size_t(n)] += value * value;
    if (n == N) return;
    double child_sum = 0.0;
    path.push_back(0);
    for (int i = 0; i < t.branching(n + 1); ++i) {
      path.back() = i;
      double cv = theta(path);
      child_sum += cv;
      self(self, cv);
    }
    path.pop_back();
    if (std::abs(child_sum - value) > kFlowTolerance)
      fail(ErrorCode::NotAFlow, "conservation violated at " + (n ? net::path_name(path) : std::string("root")));
  };
  double root_value = theta(path);
  if (std::abs(root_value - 1.0) > kFlowTolerance) fail(ErrorCode::NotAFlow, "theta(root) != 1");
  visit(visit, root_value);

  std::vector<double> out;
  for (int n = 1; n <= N; ++n) {
    double inv_h = t.L(0) / t.L(n);
    double inv_h_prev = t.L(0) / t.L(n - 1);
    out.push_back(sq[std::size_t(n)] * (inv_h - inv_h_prev));
  }
  return out;
}

double expected_w(const SphericalProfile& profile, int n) {
  check_level(profile, n, 0);
  LevelTable t(profile);
  if (n == 0) return 1.0;
  SeriesSums s = series_partial_sums(profile, n);
  return 1.0 + t.L(0) * s.partial_sums[std::size_t(n - 1)];
}

double survival_to_depth(const SphericalProfile& profile, int n) {
  check_level(profile, n, 0);
  LevelTable t(profile);
  double extinct = 0.0;
  for (int k = n; k >= 1; --k) extinct = ipow(1.0 - t.p(k) + t.p(k) * extinct, t.branching(k));
  return 1.0 - extinct;
}

ToleranceReport classify(const SphericalProfile& profile, int evidence_terms) {
  if (!profile.has_tail_rule())
    fail(ErrorCode::MissingTailRule, "classification needs a tail rule");
  TailSums ts = tail_sums(profile);
  if (!std::isfinite(ts.values[0]))
    fail(ErrorCode::RecurrentProfile, "recurrent profile: tolerance classes are undefined");

  ToleranceReport report;
  report.transient = true;
  report.tail_bound = ts.bounds[0];
  int N = std::min(evidence_terms, profile.depth());
  if (N >= 1) report.partial_sums = series_partial_sums(profile, N).partial_sums;

  net::ProfileRule rule = profile.rule();
  switch (profile.series_verdict()) {
    case net::SeriesVerdict::Diverges:
      report.classification = Tolerance::ChangeIntolerant;
      report.fired = (rule == net::ProfileRule::Binary || rule == net::ProfileRule::Geometric)
                         ? SeriesTest::Ratio
                         : SeriesTest::Custom;
      break;
    case net::SeriesVerdict::Converges:
      report.classification = Tolerance::InsertionTolerant;
      report.fired = rule == net::ProfileRule::Poly ? SeriesTest::Polynomial : SeriesTest::Custom;
      report.essentially_deletion_tolerant = profile.branching_bound().has_value();
      break;
    case net::SeriesVerdict::Unknown:
      report.classification = Tolerance::Inconclusive;
      report.fired = SeriesTest::None;
      break;
  }
  return report;
}

}  // namespace wsf::potential

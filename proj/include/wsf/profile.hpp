#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wsf::net {

enum class ProfileRule { Explicit, Binary, Geometric, Poly, Custom };
enum class SeriesVerdict { Unknown, Diverges, Converges };

// L_n = sum_{m>n} r_m/|T_m|, with an absolute uncertainty. value = +infinity
// marks a divergent (recurrent) tail; bound = 0 marks a closed form.
struct TailEstimate {
  double value = 0.0;
  double bound = 0.0;
};

// User-supplied tail closed form plus the metadata the classifier cannot
// derive from finite data: the behavior of the tolerance series and a uniform
// branching bound when one is known.
struct CustomTail {
  std::function<TailEstimate(int)> tail;  // defined on 0..depth
  SeriesVerdict series = SeriesVerdict::Unknown;
  std::optional<int> branching_bound;
};

// Spherically symmetric tree profile: every level-(n-1) vertex has b_n
// children and every level-n edge has resistance r_n. Built-in rules carry
// tail oracles; Explicit profiles carry data only and cannot answer
// questions about the infinite tree.
class SphericalProfile {
 public:
  static SphericalProfile binary(int depth);
  static SphericalProfile geometric(int b, int depth);   // b >= 1; b = 1 is the recurrent ray
  static SphericalProfile poly(double gamma, int depth);  // |T_n| = 2^floor(gamma log2(n+1)), r = 1
  static SphericalProfile explicit_data(std::vector<int> branching, std::vector<double> resistance);
  static SphericalProfile custom(std::vector<int> branching, std::vector<double> resistance, CustomTail tail);

  static SphericalProfile from_json_text(const std::string& text);
  static SphericalProfile from_json_file(const std::string& path);
  std::string to_json_text() const;  // parametric and explicit rules only

  ProfileRule rule() const;
  int depth() const;
  int branching(int n) const;      // b_n, 1 <= n <= depth
  double resistance(int n) const;  // r_n, 1 <= n <= depth
  double level_size(int n) const;  // |T_n|, 0 <= n <= depth
  int max_branching() const;       // max over stored levels

  bool has_tail_rule() const;
  TailEstimate tail_beyond(int n) const;  // L_n for 0 <= n <= depth
  SeriesVerdict series_verdict() const;   // what the rule knows analytically
  std::optional<int> branching_bound() const;

  int geometric_b() const;
  double poly_gamma() const;

  // Profile of the subtree below one level-`levels` vertex (tail rescaled by
  // |T_levels|); binary and geometric rules are self-similar, others wrap
  // the parent's tail oracle.
  SphericalProfile shifted(int levels) const;
  // Regenerate a parametric rule at a larger depth.
  SphericalProfile extended(int new_depth) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit SphericalProfile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

// Poly rule helper, shared by level data and tail grouping so the two can
// never disagree: floor(gamma * log2(n+1)).
int poly_level_exponent(double gamma, int n);

}  // namespace wsf::net

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "wsf/error.hpp"

namespace wsf {

// Neumaier-compensated accumulator. Tail sums are accumulated backward from
// the small terms; the compensation keeps the telescoping identity
// L_{n-1} - L_n = r_n/|T_n| tight to a few ulps over long ranges.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Thomas elimination for tridiagonal systems. The harmonic systems solved
// here (hitting probabilities on level chains) are strictly diagonally
// dominant, so no pivoting is required.
// lower[i] multiplies x[i-1] in row i; upper[i] multiplies x[i+1].
inline std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                             std::vector<double> upper, std::vector<double> rhs) {
  std::size_t n = diag.size();
  if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n)
    fail(ErrorCode::InvalidParameter, "tridiagonal system shape mismatch");
  for (std::size_t i = 1; i < n; ++i) {
    double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

// All emitted floating-point values go through this: 10 significant digits,
// so reruns and goldens are byte-stable.
inline std::string format_g10(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Linear interpolation quantile on an already sorted vector, q in [0,1].
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) fail(ErrorCode::InsufficientData, "quantile of empty sample");
  if (q <= 0) return sorted.front();
  if (q >= 1) return sorted.back();
  double pos = q * double(sorted.size() - 1);
  std::size_t lo = std::size_t(pos);
  double frac = pos - double(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

// Least-squares slope of y against its index over [n0, n1] inclusive.
inline double ls_slope(const std::vector<double>& y, int n0, int n1) {
  if (n0 < 0 || n1 >= int(y.size()) || n1 <= n0)
    fail(ErrorCode::InvalidParameter, "slope window out of range");
  double mx = 0, my = 0;
  int n = n1 - n0 + 1;
  for (int i = n0; i <= n1; ++i) { mx += i; my += y[i]; }
  mx /= n; my /= n;
  double num = 0, den = 0;
  for (int i = n0; i <= n1; ++i) {
    num += (i - mx) * (y[i] - my);
    den += (i - mx) * (i - mx);
  }
  return num / den;
}

}  // namespace wsf

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "swankit/expr.hpp"

namespace swankit {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// Chebyshev-Lobatto points of `iv` (endpoints included), ascending.
inline std::vector<double> chebyshev_points(Interval iv, std::size_t n = 101) {
  std::vector<double> pts(n);
  if (n == 1) {
    pts[0] = iv.mid();
    return pts;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = std::numbers::pi * static_cast<double>(n - 1 - j) / static_cast<double>(n - 1);
    pts[j] = iv.mid() + 0.5 * iv.width() * std::cos(theta);
  }
  pts.front() = iv.lo;
  pts.back() = iv.hi;
  return pts;
}

inline std::vector<double> uniform_points(Interval iv, std::size_t n) {
  std::vector<double> pts(n);
  if (n == 1) {
    pts[0] = iv.lo;
    return pts;
  }
  const double h = iv.width() / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) pts[j] = iv.lo + h * static_cast<double>(j);
  pts.back() = iv.hi;
  return pts;
}

/// Mixed absolute/relative tolerance: |a - b| <= abs + rel * max(|a|, |b|).
struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-10;

  double bound(double a, double b) const { return abs + rel * std::max(std::abs(a), std::abs(b)); }
  bool accepts(double a, double b) const { return std::abs(a - b) <= bound(a, b); }
};

struct PointwiseReport {
  double max_abs_diff = 0.0;
  /// max over samples of |a - b| / bound(a, b); <= 1 means every sample passed.
  double max_scaled_diff = 0.0;
  double worst_point = 0.0;
  std::size_t samples = 0;

  bool passed() const { return max_scaled_diff <= 1.0; }

  void merge(const PointwiseReport& other) {
    if (other.max_scaled_diff > max_scaled_diff) {
      max_scaled_diff = other.max_scaled_diff;
      worst_point = other.worst_point;
    }
    max_abs_diff = std::max(max_abs_diff, other.max_abs_diff);
    samples += other.samples;
  }
};

inline PointwiseReport compare_pointwise(const ScalarExpr& a, const ScalarExpr& b, std::span<const double> samples,
                                         Tolerance tol = {}, const ParamMap& params = {}) {
  PointwiseReport r;
  for (const double t : samples) {
    const double va = evaluate(a, t, params);
    const double vb = evaluate(b, t, params);
    const double diff = std::abs(va - vb);
    const double scaled = diff / tol.bound(va, vb);
    r.max_abs_diff = std::max(r.max_abs_diff, diff);
    if (r.samples == 0 || scaled > r.max_scaled_diff) {
      r.max_scaled_diff = scaled;
      r.worst_point = t;
    }
    ++r.samples;
  }
  return r;
}

/// Compares `e` against zero with an absolute tolerance only.
inline PointwiseReport sup_norm(const ScalarExpr& e, std::span<const double> samples, double abs_tol,
                                const ParamMap& params = {}) {
  return compare_pointwise(e, ScalarExpr(0.0), samples, Tolerance{abs_tol, 0.0}, params);
}

}  // namespace swankit

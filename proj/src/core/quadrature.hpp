#pragma once

#include <cmath>
#include <vector>

namespace latdisc {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Cached, thread-safe; the returned reference stays valid for the program
/// lifetime.
const GaussRule& gauss_legendre(int n);

template <class F>
double integrate_gauss(F&& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

namespace detail {
template <class F>
double adaptive_step(F& f, double a, double b, double whole, double tol, int depth,
                     const GaussRule& hi) {
  const double m = 0.5 * (a + b);
  const double left = integrate_gauss(f, a, m, hi);
  const double right = integrate_gauss(f, m, b, hi);
  const double diff = std::abs(left + right - whole);
  if (depth <= 0 || diff <= tol || diff <= 1e-15 * std::abs(left + right)) return left + right;
  return adaptive_step(f, a, m, left, 0.5 * tol, depth - 1, hi) +
         adaptive_step(f, m, b, right, 0.5 * tol, depth - 1, hi);
}
}  // namespace detail

/// Adaptive Gauss-Legendre: a panel is accepted when its 20-point value agrees
/// with the sum over its two halves to within the panel's share of abs_tol.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol, int max_depth = 16) {
  const GaussRule& hi = gauss_legendre(20);
  const double whole = integrate_gauss(f, a, b, hi);
  return detail::adaptive_step(f, a, b, whole, abs_tol, max_depth, hi);
}

}  // namespace latdisc

#include "core/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "core/error.hpp"
#include "core/quadrature.hpp"

namespace latdisc {
namespace {

constexpr double kPi = std::numbers::pi;

double series_j(int order, double s) {
  const long double half = static_cast<long double>(s) / 2;
  const long double q = half * half;
  long double term = order == 0 ? 1.0L : half;
  long double sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -q / (static_cast<long double>(m) * (m + order));
    sum += term;
    if (std::abs(term) < 1e-24L) break;
  }
  return static_cast<double>(sum);
}

double hankel_j(int order, double s) {
  const double mu = 4.0 * order * order;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double previous = INFINITY;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k * s);
    const double mag = std::abs(term);
    if (mag == 0.0 || mag > previous) break;
    previous = mag;
    // a_k / s^k enters P with sign (-1)^(k/2) for even k, Q with (-1)^((k-1)/2).
    switch (k % 4) {
      case 0: p += term; break;
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
    }
    if (mag < 1e-17) break;
  }
  // cos/sin of s - (order/2 + 1/4) pi expanded so no phase is subtracted.
  const double cs = std::cos(s), sn = std::sin(s);
  const double r = std::numbers::sqrt2 / 2;
  double cchi, schi;
  if (order == 0) {
    cchi = r * (cs + sn);
    schi = r * (sn - cs);
  } else {
    cchi = r * (sn - cs);
    schi = -r * (sn + cs);
  }
  return std::sqrt(2.0 / (kPi * s)) * (p * cchi - q * schi);
}

void check_bessel_args(int order, double s) {
  if (order != 0 && order != 1) throw_invalid("bessel_j: order must be 0 or 1");
  if (!std::isfinite(s) || s < 0.0)
    throw_invalid("bessel_j: argument must be finite and nonnegative");
}

double raw_bump(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

}  // namespace

double bessel_j(int order, double s) {
  check_bessel_args(order, s);
  if (s <= kBesselSeriesLimit) return series_j(order, s);
  return hankel_j(order, s);
}

double bessel_j_leading_asymptotic(int order, double s) {
  check_bessel_args(order, s);
  if (s == 0.0) throw_invalid("bessel_j_leading_asymptotic: argument must be positive");
  const double cs = std::cos(s), sn = std::sin(s);
  const double r = std::numbers::sqrt2 / 2;
  const double cchi = order == 0 ? r * (cs + sn) : r * (sn - cs);
  return std::sqrt(2.0 / (kPi * s)) * cchi;
}

double bessel_j_zero(int order, int k) {
  if (order != 0 && order != 1) throw_invalid("bessel_j_zero: order must be 0 or 1");
  if (k < 1) throw_invalid("bessel_j_zero: index must be positive");
  const double mu = 4.0 * order * order;
  const double beta = (k + 0.5 * order - 0.25) * kPi;
  const double e8 = 8.0 * beta;
  const double guess =
      beta - (mu - 1.0) / e8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e8 * e8 * e8);
  double a = guess - 0.5, b = guess + 0.5;
  double fa = bessel_j(order, a), fb = bessel_j(order, b);
  if (fa * fb > 0.0) throw Error(ErrorCode::Internal, "bessel_j_zero: bracket lost");
  for (int iter = 0; iter < 200 && b - a > 4e-16 * b; ++iter) {
    // Secant proposal, falling back to bisection when it leaves the bracket.
    double m = b - fb * (b - a) / (fb - fa);
    if (!(m > a && m < b) || iter % 3 == 2) m = 0.5 * (a + b);
    const double fm = bessel_j(order, m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

void BumpSpec::validate() const {
  if (profile != BumpProfile::Exponential) throw_invalid("BumpSpec: unknown profile");
  if (mass != 1.0) throw_invalid("BumpSpec: total mass is fixed to 1");
}

double bump_normalization(const BumpSpec& spec) {
  spec.validate();
  static const double c = [] {
    const double mass = 2.0 * kPi *
                        integrate_adaptive([](double r) { return raw_bump(r) * r; }, 0.0,
                                           1.0, 1e-16);
    return 1.0 / mass;
  }();
  return c;
}

double bump_value(double r, const BumpSpec& spec) {
  return bump_normalization(spec) * raw_bump(std::abs(r));
}

double bump_fourier(double rho, const BumpSpec& spec) {
  if (!std::isfinite(rho) || rho < 0.0)
    throw_invalid("bump_fourier: radial frequency must be finite and nonnegative");
  const double c = bump_normalization(spec);
  if (rho == 0.0) {
    return 2.0 * kPi * c *
           integrate_adaptive([](double r) { return raw_bump(r) * r; }, 0.0, 1.0, 1e-16);
  }
  const double w = 2.0 * kPi * rho;
  auto f = [w](double r) { return raw_bump(r) * bessel_j(0, w * r) * r; };
  // Panels between consecutive zeros of J_0(w r) keep each integrand
  // single-signed; McMahon's estimate is accurate enough for panel edges.
  double total = 0.0;
  double left = 0.0;
  for (int k = 1;; ++k) {
    const double beta = (k - 0.25) * kPi;
    const double zero = beta + 1.0 / (8.0 * beta);
    const double right = zero / w;
    if (right >= 1.0) break;
    total += integrate_adaptive(f, left, right, 1e-16);
    left = right;
  }
  total += integrate_adaptive(f, left, 1.0, 1e-16);
  return 2.0 * kPi * c * total;
}

}  // namespace latdisc

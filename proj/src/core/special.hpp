#pragma once

#include <cstdint>

namespace latdisc {

/// Bessel function of the first kind, J_0 or J_1, for s >= 0.
///
/// Power series in extended precision below `kBesselSeriesLimit`, Hankel's
/// asymptotic expansion (run to its smallest term) above it. Absolute error
/// stays below 1e-12 on [0, 50] and the relative error below 1e-10 away from
/// the zeros beyond that.
double bessel_j(int order, double s);

inline constexpr double kBesselSeriesLimit = 18.0;

/// k-th positive zero (k >= 1) of J_order, located by bracketing around
/// McMahon's estimate and refining with bisection/secant steps.
double bessel_j_zero(int order, int k);

/// Leading Hankel term sqrt(2/(pi s)) cos(s - (order/2 + 1/4) pi).
double bessel_j_leading_asymptotic(int order, double s);

enum class BumpProfile : std::uint8_t {
  /// c * exp(-1 / (1 - |x|^2)) on the open unit disk.
  Exponential = 0,
};

struct BumpSpec {
  BumpProfile profile = BumpProfile::Exponential;
  /// Total mass; only 1 is supported.
  double mass = 1.0;

  void validate() const;
};

/// Radial profile phi(r) of the mollifier, normalized to unit mass over R^2.
double bump_value(double r, const BumpSpec& spec = {});

/// The normalization constant c in front of exp(-1/(1-r^2)).
double bump_normalization(const BumpSpec& spec = {});

/// Radial Fourier transform phi_hat(rho) = 2 pi int_0^1 phi(r) J_0(2 pi rho r) r dr,
/// integrated panel-wise between the zeros of the Bessel factor.
double bump_fourier(double rho, const BumpSpec& spec = {});

}  // namespace latdisc

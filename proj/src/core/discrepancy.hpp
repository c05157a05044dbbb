#pragma once

#include <cstdint>
#include <vector>

#include "core/counting.hpp"
#include "core/special.hpp"

namespace latdisc {

struct DiscrepancySample {
  DomainSpec domain;
  double R = 0.0;
  ShiftVec shift;
  std::uint64_t count = 0;
  double measure = 0.0;
  /// count - measure, formed in extended precision and rounded once.
  double value = 0.0;
  std::uint64_t boundary_hits = 0;
};

DiscrepancySample disc(const DomainSpec& domain, double R, ShiftVec shift);

/// disc(annulus) - [disc(disk, R + t) - disc(disk, R - t)], closed boundaries
/// throughout. The two disk radii are kept exact, so the result is the number
/// of lattice points on the inner circle (0 for generic shifts).
double disc_annulus_identity_residual(double R, double t, ShiftVec shift);

struct MollifiedParams {
  /// Signed scale: the indicator of (R + delta) * domain is smoothed by the
  /// bump at scale |delta|.
  double delta = 0.1;
  BumpSpec bump;
  /// Gauss-Legendre points per axis of the convolution quadrature.
  int quad_points = 64;

  void validate() const;
};

inline constexpr int kMinQuadPoints = 16;

/// (chi_{scaled * domain} * phi_r)(c) at a point c given relative to the
/// centre; r > 0 is the mollifier radius. Disk and ellipse only.
double convolved_indicator(const DomainSpec& domain, double scaled, double c1, double c2,
                           double r, const BumpSpec& bump, int quad_points);

/// Mollified discrepancy: sum over lattice points of the smoothed indicator of
/// (R + delta) * domain, minus R^2 |domain|. Points farther than |delta| from
/// the boundary contribute exactly 0 or 1; the rest are integrated.
double disc_mollified(const DomainSpec& domain, double R, ShiftVec shift,
                      const MollifiedParams& params, unsigned workers = 1);

/// Number of lattice points that needed quadrature in disc_mollified.
std::uint64_t mollified_band_points(const DomainSpec& domain, double R, ShiftVec shift,
                                    double delta);

/// The disk case of disc_mollified for many shifts at fixed (R, delta). The
/// smoothed indicator is radial there, so it is tabulated once on the band
/// |c| in [R + delta - |delta|, R + delta + |delta|] and interpolated.
class MollifiedDiskField {
 public:
  MollifiedDiskField(double R, const MollifiedParams& params);

  double value(ShiftVec shift) const;
  /// Smoothed indicator at distance rho from the centre.
  double profile(double rho) const;

  double R() const { return R_; }
  double delta() const { return delta_; }

 private:
  double R_, delta_, scaled_, radius_;
  double lo_, step_;
  std::vector<double> table_;
};

struct SandwichReport {
  double R = 0.0;
  ShiftVec shift;
  double delta = 0.0;

  std::uint64_t samples = 0;
  /// Samples where smooth(R - delta) <= sharp(R) <= smooth(R + delta) fails
  /// by more than the quadrature tolerance.
  std::uint64_t pointwise_violations = 0;
  double max_pointwise_excess = 0.0;

  double d_minus = 0.0;  // disc_mollified at -delta
  double d = 0.0;
  double d_plus = 0.0;   // disc_mollified at +delta
  double margin = 0.0;   // quadrature allowance for the lattice sums
  bool sum_ordered = true;
  /// |D|^p <= |D_-|^p + |D_+|^p for p = 2 and 4.
  bool power2_holds = true;
  bool power4_holds = true;
  /// |D| <= max(|D_-|, |D_+|).
  bool max_form_holds = true;

  std::uint64_t violations() const;
};

inline constexpr double kPointwiseTolerance = 1e-8;

/// Checks the pointwise squeeze of the sharp indicator between the two
/// smoothed ones at `samples` seeded points (half of them in the boundary
/// band), then the summed squeeze and its p-th power consequences at `shift`.
/// Disk, or ellipse with both semi-axes >= 1.
SandwichReport sandwich_check(const DomainSpec& domain, double R, ShiftVec shift, double delta,
                              std::uint64_t samples, std::uint64_t seed, int quad_points = 64);

}  // namespace latdisc

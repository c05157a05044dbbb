#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/counting.hpp"

namespace latdisc {

enum class EstimatorKind { Grid, MonteCarlo };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Grid;
  /// Grid side m (m x m shifts) or number of Monte Carlo samples.
  std::uint64_t size = 64;
  /// Ignored by the grid estimator.
  std::uint64_t seed = 0;

  static EstimatorConfig grid(std::uint64_t m) { return {EstimatorKind::Grid, m, 0}; }
  static EstimatorConfig monte_carlo(std::uint64_t samples, std::uint64_t seed) {
    return {EstimatorKind::MonteCarlo, samples, seed};
  }
  /// "grid" or "mc".
  std::string label() const;
  void validate() const;
};

struct MomentEstimate {
  DomainSpec domain;
  double R = 0.0;
  double p = 2.0;
  EstimatorConfig estimator;
  /// Mean of |D|^p over the shifts.
  double estimate = 0.0;
  /// Standard error of the Monte Carlo mean; 0 for the grid.
  double stderr_ = 0.0;

  double lp_norm() const;
};

/// p-th moment of the discrepancy over the torus of shifts. The grid uses
/// shifts (i/m, j/m); Monte Carlo draws seeded uniform shifts in blocks.
/// Results do not depend on the worker count.
MomentEstimate moment_estimate(const DomainSpec& domain, double R, double p,
                               const EstimatorConfig& est, unsigned workers = 1);

/// Several exponents from one pass over the shifts; entry i is bit-identical
/// to moment_estimate(domain, R, ps[i], est).
std::vector<MomentEstimate> moment_estimates(const DomainSpec& domain, double R,
                                             const std::vector<double>& ps,
                                             const EstimatorConfig& est, unsigned workers = 1);

/// How the annulus half-thickness follows the radius in a sweep.
struct TRule {
  enum class Kind { Fixed, PowerLaw };
  Kind kind = Kind::Fixed;
  /// t for Fixed, alpha (t = R^alpha) for PowerLaw.
  double value = 0.0;

  static TRule fixed(double t) { return {Kind::Fixed, t}; }
  static TRule power_law(double alpha) { return {Kind::PowerLaw, alpha}; }
  double at(double R) const;
  std::string describe() const;
};

struct SweepCell {
  MomentEstimate moment;
  bool ok = true;
  std::string error;
};

struct MomentTable {
  /// R outer, p inner, in the order given.
  std::vector<SweepCell> cells;
  std::optional<TRule> t_rule;
};

/// Full cross product of radii and exponents. A failing radius marks its
/// cells as failed instead of aborting. With an annulus domain and a t_rule,
/// the half-thickness of each cell is t_rule.at(R).
MomentTable sweep(const DomainSpec& domain, const std::vector<double>& radii,
                  const std::vector<double>& ps, const EstimatorConfig& est,
                  unsigned workers = 1, std::optional<TRule> t_rule = std::nullopt);

enum class FitMode {
  Plain,
  /// Fits log(moment / (R^s log R)) against log R.
  LogCorrected,
};

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 0.0;
  double sse = 0.0;
  double sst = 0.0;
  /// (log R, fitted ordinate) pairs.
  std::vector<std::pair<double, double>> points;
};

/// Ordinary least squares of log(value) on log(R); needs at least three
/// distinct radii and positive values.
ScalingFit fit_power_law(const std::vector<double>& radii, const std::vector<double>& values,
                         FitMode mode = FitMode::Plain, double s = 0.0);

/// fit_power_law over the successful cells of `table` with exponent p.
ScalingFit scaling_fit(const MomentTable& table, double p, FitMode mode = FitMode::Plain,
                       double s = 0.0);

struct EnvelopeConfig {
  /// Assumed pointwise exponent |D(disk, x, R)| <~ R^theta, in (1/2, 1].
  double theta = 2.0 / 3.0;
  double epsilon = 0.01;
  TRule t_rule = TRule::power_law(-0.5);

  void validate() const;
};

/// Which branch of the annulus L^p bound applies: "thin" when
/// R^{1-2 theta} >= t, otherwise "thick_p_lt_4" or "thick_p_ge_4".
std::string annulus_regime(double R, double t, double theta, double p);

/// The same decision for t = R^alpha and large R, read off the sign of
/// (1 - 2 theta) - alpha; "boundary" when it vanishes.
std::string annulus_regime_for_power_law(double theta, double alpha, double p);

struct EnvelopeRow {
  std::string bound;
  std::string domain;
  double R = 0.0;
  double t = 0.0;
  double p = 0.0;
  double measured = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
  std::string regime;
  bool excluded = false;
  std::string note;
};

struct EnvelopeSummary {
  std::string bound;
  double p = 0.0;
  std::size_t cells = 0;
  /// Extremes of the ratio over the top octave of radii.
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool bounded = false;
};

struct EnvelopeReport {
  std::vector<EnvelopeRow> rows;
  std::vector<EnvelopeSummary> summaries;
};

inline constexpr double kRegimeBoundaryTolerance = 0.01;
inline constexpr double kBoundedSpread = 4.0;

/// Measured values against every applicable envelope:
///   disk/ellipse: lp_lower_sqrt_r (L^p norm / R^{1/2}), second_moment_linear
///   (p = 2, moment / R), fourth_moment_r2logr (p = 4, moment / (R^2 log R));
///   annulus: annulus_lp_regime (the three-branch bound), annulus_lp_hausdorff_young
///   (2 <= p < 4, R^{1/2} t^{p/(8-2p)}), annulus_l2_sqrt_rt (p = 2, (R t)^{1/2})
///   and annulus_m2_area (p = 2, moment / (4 pi R t)).
/// A bound counts as bounded when max/min of its ratio over the top octave
/// of R is at most 4.
EnvelopeReport envelope_report(const MomentTable& table, const EnvelopeConfig& config);

struct CountHistogram {
  double R = 0.0;
  double t = 0.0;
  std::uint64_t shifts = 0;
  std::uint64_t seed = 0;
  /// frequency[k] = number of shifts with count k.
  std::vector<std::uint64_t> frequency;
  double mean = 0.0;
  double variance = 0.0;
  double stderr_mean = 0.0;
  /// Area 4 pi R t, the Poisson parameter.
  double lambda = 0.0;
  /// Total-variation distance between the empirical law and Poisson(lambda).
  double tv_distance = 0.0;
};

/// Distribution of raw closed-annulus counts over seeded uniform shifts.
CountHistogram count_histogram(double R, double t, std::uint64_t shifts, std::uint64_t seed,
                               unsigned workers = 1);

}  // namespace latdisc

#include "core/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/quadrature.hpp"
#include "core/random.hpp"

namespace latdisc {
namespace {

constexpr long double kPiL = std::numbers::pi_v<long double>;

struct Axes {
  double a = 1.0;
  double b = 1.0;
};

Axes axes_of(const DomainSpec& domain) {
  if (const auto* e = std::get_if<Ellipse>(&domain.shape)) return {e->a, e->b};
  if (domain.kind() == DomainKind::Annulus)
    throw_invalid("mollified discrepancy is defined for disks and ellipses only");
  return {};
}

long double unit_area(const DomainSpec& domain) {
  const Axes ax = axes_of(domain);
  return kPiL * static_cast<long double>(ax.a) * ax.b;
}

/// Integral of exp(-1/(1 - |z|^2)) over {|z| < 1, c + r z in scaled * ellipse},
/// in a frame where the inner variable runs along the ellipse normal at c.
double clipped_bump_integral(Axes ax, double scaled, double c1, double c2, double r,
                             const GaussRule& rule) {
  const double ia2 = 1.0 / (ax.a * ax.a), ib2 = 1.0 / (ax.b * ax.b);
  double n1 = c1 * ia2, n2 = c2 * ib2;
  const double norm = std::hypot(n1, n2);
  if (norm > 0.0) {
    n1 /= norm;
    n2 /= norm;
  } else {
    n1 = 1.0;
    n2 = 0.0;
  }
  const double t1 = -n2, t2 = n1;
  const double qn = n1 * n1 * ia2 + n2 * n2 * ib2;
  const double s2 = scaled * scaled;

  double outer = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    const double eta = rule.nodes[i];
    const double w2 = 1.0 - eta * eta;
    const double w = std::sqrt(w2);
    const double p1 = c1 + r * eta * t1, p2 = c2 + r * eta * t2;
    // Q(p + r s n) - scaled^2 = qa s^2 + qb s + qc.
    const double qa = r * r * qn;
    const double qb = 2.0 * r * (p1 * n1 * ia2 + p2 * n2 * ib2);
    const double qc = (p1 * p1 * ia2 + p2 * p2 * ib2) - s2;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (qb + std::copysign(sq, qb));
    double lo = q / qa, hi = q != 0.0 ? qc / q : -lo;
    if (lo > hi) std::swap(lo, hi);
    lo = std::max(lo, -w);
    hi = std::min(hi, w);
    if (hi <= lo) continue;
    auto f = [eta2 = eta * eta](double s) {
      const double u = 1.0 - eta2 - s * s;
      return u > 0.0 ? std::exp(-1.0 / u) : 0.0;
    };
    outer += rule.weights[i] * integrate_gauss(f, lo, hi, rule);
  }
  return outer;
}

/// Shape of the row enumeration shared by the direct and tabulated paths.
struct Band {
  Axes ax;
  double scaled = 0.0;  // R + delta
  double r = 0.0;       // |delta|
};

/// Sum over lattice points of the smoothed indicator. Points whose r-disk is
/// inside the scaled domain add 1; everything else within reach goes through
/// band_value(c1, c2). Rows are summed separately and reduced in order.
template <class F>
long double smoothed_sum(const Band& band, ShiftVec x, F&& band_value, unsigned workers,
                         std::uint64_t* band_points = nullptr) {
  const double reach = band.r / std::min(band.ax.a, band.ax.b);
  const double ro = band.scaled + reach;
  const double ri = band.scaled - reach;
  const double eps = 1e-9 * (1.0 + ro * std::max(band.ax.a, band.ax.b));
  const auto kmin = static_cast<std::int64_t>(std::floor(x.x2() - band.ax.b * ro)) - 1;
  const auto kmax = static_cast<std::int64_t>(std::ceil(x.x2() + band.ax.b * ro)) + 1;
  const auto rows = static_cast<std::size_t>(kmax - kmin + 1);

  std::vector<long double> row_sum(rows, 0.0L);
  std::vector<std::uint64_t> row_band(rows, 0);
  parallel_for(rows, workers, [&](std::size_t idx) {
    const std::int64_t k = kmin + static_cast<std::int64_t>(idx);
    const double c2 = static_cast<double>(k) - x.x2();
    const double v = c2 / band.ax.b;
    const double ho2 = ro * ro - v * v;
    if (ho2 <= 0.0) return;
    const double ho = band.ax.a * std::sqrt(ho2);
    const auto jlo = static_cast<std::int64_t>(std::floor(x.x1() - ho));
    const auto jhi = static_cast<std::int64_t>(std::ceil(x.x1() + ho));

    std::int64_t ilo = 1, ihi = 0;
    if (ri > 0.0 && ri * ri - v * v > 0.0) {
      const double hi = band.ax.a * std::sqrt(ri * ri - v * v);
      ilo = static_cast<std::int64_t>(std::ceil(x.x1() - hi + eps));
      ihi = static_cast<std::int64_t>(std::floor(x.x1() + hi - eps));
    }
    long double sum = 0.0L;
    std::uint64_t nband = 0;
    if (ihi >= ilo) sum += static_cast<long double>(ihi - ilo + 1);
    for (std::int64_t j = jlo; j <= jhi; ++j) {
      if (ihi >= ilo && j >= ilo && j <= ihi) {
        j = ihi;
        continue;
      }
      sum += band_value(static_cast<double>(j) - x.x1(), c2);
      ++nband;
    }
    row_sum[idx] = sum;
    row_band[idx] = nband;
  });

  long double total = 0.0L;
  std::uint64_t nband = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    total += row_sum[i];
    nband += row_band[i];
  }
  if (band_points) *band_points = nband;
  return total;
}

void check_mollified_args(const DomainSpec& domain, double R, double delta) {
  axes_of(domain);
  domain.validate();
  if (!std::isfinite(R) || R < 1.0 || R > kMaxCountRadius)
    throw_range("disc_mollified: radius out of range");
  if (!(std::abs(delta) < 1.0) || delta == 0.0)
    throw_invalid("disc_mollified: delta must be nonzero with |delta| < 1");
  if (R + delta < 1.0) throw_range("disc_mollified: R + delta must be at least 1");
}

}  // namespace

DiscrepancySample disc(const DomainSpec& domain, double R, ShiftVec shift) {
  const CountResult c = count(domain, R, shift);
  DiscrepancySample s;
  s.domain = domain;
  s.R = R;
  s.shift = shift;
  s.count = c.count;
  s.measure = c.measure;
  s.boundary_hits = c.boundary_hits;
  s.value = static_cast<double>(static_cast<long double>(c.count) - measure_extended(domain, R));
  return s;
}

double disc_annulus_identity_residual(double R, double t, ShiftVec shift) {
  if (!(t > 0.0 && t < 1.0)) throw_invalid("annulus half-thickness must lie in (0, 1)");
  if (!std::isfinite(R) || R - t < 1.0) throw_range("identity residual needs R - t >= 1");
  const auto ring = count(DomainSpec::annulus(t), R, shift).count;
  const auto outer = detail::count_circle(exact::Expansion::sum(R, t), shift, true).count;
  const auto inner = detail::count_circle(exact::Expansion::sum(R, -t), shift, true).count;
  const auto count_part = static_cast<long double>(ring) -
                          (static_cast<long double>(outer) - static_cast<long double>(inner));
  // Area part: 4 R t - ((R + t)^2 - (R - t)^2), evaluated exactly.
  const exact::Expansion rp = exact::Expansion::sum(R, t);
  const exact::Expansion rm = exact::Expansion::sum(R, -t);
  exact::Expansion area = rp * rp - rm * rm;
  area -= exact::Expansion::product(R, t).scaled(4.0);
  const long double area_part = kPiL * area.estimate();
  return static_cast<double>(count_part - area_part);
}

void MollifiedParams::validate() const {
  if (!(std::abs(delta) < 1.0) || delta == 0.0 || !std::isfinite(delta))
    throw_invalid("MollifiedParams: delta must be nonzero with |delta| < 1");
  if (quad_points < kMinQuadPoints) throw_invalid("MollifiedParams: quad_points must be >= 16");
  if (quad_points > 4096) throw_invalid("MollifiedParams: quad_points must be <= 4096");
  bump.validate();
}

double convolved_indicator(const DomainSpec& domain, double scaled, double c1, double c2,
                           double r, const BumpSpec& bump, int quad_points) {
  const Axes ax = axes_of(domain);
  if (!(r > 0.0) || !std::isfinite(r)) throw_invalid("convolved_indicator: radius must be positive");
  if (quad_points < kMinQuadPoints) throw_invalid("convolved_indicator: quad_points must be >= 16");
  const GaussRule& rule = gauss_legendre(quad_points);
  return bump_normalization(bump) * clipped_bump_integral(ax, scaled, c1, c2, r, rule);
}

double disc_mollified(const DomainSpec& domain, double R, ShiftVec shift,
                      const MollifiedParams& params, unsigned workers) {
  params.validate();
  check_mollified_args(domain, R, params.delta);
  const Band band{axes_of(domain), R + params.delta, std::abs(params.delta)};
  const GaussRule& rule = gauss_legendre(params.quad_points);
  const double c = bump_normalization(params.bump);
  const long double sum = smoothed_sum(
      band, shift,
      [&](double c1, double c2) {
        return c * clipped_bump_integral(band.ax, band.scaled, c1, c2, band.r, rule);
      },
      workers);
  const long double rr = R;
  return static_cast<double>(sum - unit_area(domain) * rr * rr);
}

std::uint64_t mollified_band_points(const DomainSpec& domain, double R, ShiftVec shift,
                                    double delta) {
  check_mollified_args(domain, R, delta);
  const Band band{axes_of(domain), R + delta, std::abs(delta)};
  std::uint64_t n = 0;
  smoothed_sum(band, shift, [](double, double) { return 0.0; }, 1, &n);
  return n;
}

namespace {
constexpr int kProfileIntervals = 512;
constexpr int kProfilePad = 4;
}  // namespace

MollifiedDiskField::MollifiedDiskField(double R, const MollifiedParams& params)
    : R_(R), delta_(params.delta) {
  params.validate();
  check_mollified_args(DomainSpec::disk(), R, params.delta);
  scaled_ = R + params.delta;
  radius_ = std::abs(params.delta);
  step_ = 2.0 * radius_ / kProfileIntervals;
  lo_ = scaled_ - radius_ - kProfilePad * step_;
  const int n = kProfileIntervals + 2 * kProfilePad + 1;
  table_.assign(static_cast<std::size_t>(n), 0.0);
  const GaussRule& rule = gauss_legendre(params.quad_points);
  const double c = bump_normalization(params.bump);
  for (int i = 0; i < n; ++i) {
    const double rho = lo_ + i * step_;
    if (rho <= scaled_ - radius_) {
      table_[static_cast<std::size_t>(i)] = 1.0;
    } else if (rho < scaled_ + radius_) {
      table_[static_cast<std::size_t>(i)] =
          c * clipped_bump_integral(Axes{}, scaled_, rho, 0.0, radius_, rule);
    }
  }
}

double MollifiedDiskField::profile(double rho) const {
  if (rho <= scaled_ - radius_) return 1.0;
  if (rho >= scaled_ + radius_) return 0.0;
  // Degree-7 Lagrange interpolation on the eight surrounding nodes.
  const double u = (rho - lo_) / step_;
  int first = static_cast<int>(std::floor(u)) - 3;
  first = std::clamp(first, 0, static_cast<int>(table_.size()) - 8);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    double w = 1.0;
    for (int j = 0; j < 8; ++j)
      if (j != i) w *= (u - (first + j)) / static_cast<double>(i - j);
    sum += w * table_[static_cast<std::size_t>(first + i)];
  }
  return sum;
}

double MollifiedDiskField::value(ShiftVec shift) const {
  const Band band{Axes{}, scaled_, radius_};
  const long double sum = smoothed_sum(
      band, shift, [this](double c1, double c2) { return profile(std::hypot(c1, c2)); }, 1);
  const long double rr = R_;
  return static_cast<double>(sum - kPiL * rr * rr);
}

std::uint64_t SandwichReport::violations() const {
  std::uint64_t v = pointwise_violations;
  if (!sum_ordered) ++v;
  if (!power2_holds) ++v;
  if (!power4_holds) ++v;
  if (!max_form_holds) ++v;
  return v;
}

SandwichReport sandwich_check(const DomainSpec& domain, double R, ShiftVec shift, double delta,
                              std::uint64_t samples, std::uint64_t seed, int quad_points) {
  if (!(delta > 0.0 && delta < 1.0)) throw_invalid("sandwich_check: delta must lie in (0, 1)");
  check_mollified_args(domain, R, -delta);
  const Axes ax = axes_of(domain);
  // The squeeze needs (R + delta) * domain to contain the delta-neighbourhood
  // of R * domain; the gap between the two boundaries is delta times the
  // support function, whose minimum is the smaller semi-axis.
  if (std::min(ax.a, ax.b) < 1.0)
    throw_invalid("sandwich_check: the squeeze needs both semi-axes >= 1");
  const BumpSpec bump;

  SandwichReport rep;
  rep.R = R;
  rep.shift = shift;
  rep.delta = delta;
  rep.samples = samples;

  const double reach = delta / std::min(ax.a, ax.b);
  BlockRng rng(seed, 0);
  for (std::uint64_t s = 0; s < samples; ++s) {
    double c1, c2;
    if (s % 2 == 0) {
      const double ang = 2.0 * std::numbers::pi * rng.uniform();
      const double rho = R - 2.0 * reach + 4.0 * reach * rng.uniform();
      c1 = ax.a * rho * std::cos(ang);
      c2 = ax.b * rho * std::sin(ang);
    } else {
      c1 = (2.0 * rng.uniform() - 1.0) * (ax.a * R + 1.0);
      c2 = (2.0 * rng.uniform() - 1.0) * (ax.b * R + 1.0);
    }
    const double q = (c1 / ax.a) * (c1 / ax.a) + (c2 / ax.b) * (c2 / ax.b);
    const double sharp = q <= R * R ? 1.0 : 0.0;
    const double lower = convolved_indicator(domain, R - delta, c1, c2, delta, bump, quad_points);
    const double upper = convolved_indicator(domain, R + delta, c1, c2, delta, bump, quad_points);
    const double excess = std::max(lower - sharp, sharp - upper);
    rep.max_pointwise_excess = std::max(rep.max_pointwise_excess, excess);
    if (excess > kPointwiseTolerance) ++rep.pointwise_violations;
  }

  MollifiedParams params;
  params.quad_points = quad_points;
  params.delta = -delta;
  rep.d_minus = disc_mollified(domain, R, shift, params);
  params.delta = delta;
  rep.d_plus = disc_mollified(domain, R, shift, params);
  rep.d = disc(domain, R, shift).value;

  const auto band = mollified_band_points(domain, R, shift, -delta) +
                    mollified_band_points(domain, R, shift, delta);
  rep.margin = 1e-6 * static_cast<double>(band + 1);
  rep.sum_ordered = rep.d_minus <= rep.d + rep.margin && rep.d <= rep.d_plus + rep.margin;

  const double big = std::max({std::abs(rep.d_minus), std::abs(rep.d), std::abs(rep.d_plus)});
  auto power_holds = [&](double p) {
    const double slack = p * std::pow(big, p - 1.0) * rep.margin;
    return std::pow(std::abs(rep.d), p) <=
           std::pow(std::abs(rep.d_minus), p) + std::pow(std::abs(rep.d_plus), p) + slack;
  };
  rep.power2_holds = power_holds(2.0);
  rep.power4_holds = power_holds(4.0);
  rep.max_form_holds =
      std::abs(rep.d) <= std::max(std::abs(rep.d_minus), std::abs(rep.d_plus)) + rep.margin;
  return rep;
}

}  // namespace latdisc

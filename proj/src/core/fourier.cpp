#include "core/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "core/counting.hpp"
#include "core/discrepancy.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/quadrature.hpp"

namespace latdisc {
namespace {

constexpr double kPi = std::numbers::pi;

double frequency_norm(double xi1, double xi2, const char* who) {
  if (!std::isfinite(xi1) || !std::isfinite(xi2)) throw_invalid(std::string(who) + ": non-finite frequency");
  const double r = std::hypot(xi1, xi2);
  if (r == 0.0) throw_invalid(std::string(who) + ": frequency must be nonzero");
  return r;
}

void check_radius(double R, const char* who) {
  if (!std::isfinite(R) || R <= 0.0) throw_invalid(std::string(who) + ": radius must be positive");
}

void check_ring(double R, double t, const char* who) {
  check_radius(R, who);
  if (!(t > 0.0 && t < R) || !std::isfinite(t))
    throw_invalid(std::string(who) + ": need 0 < t < R");
}

double disk_transform_radial(double R, double rho) {
  return R / rho * bessel_j(1, 2.0 * kPi * R * rho);
}

double a_radial(double R, double delta, double rho, const BumpSpec& bump) {
  if (rho == 0.0) return kPi * (2.0 * delta * R + delta * delta);
  return disk_transform_radial(R + delta, rho) * bump_fourier(std::abs(delta) * rho, bump);
}

/// Values of a radial function at every integer k = |n|^2 <= kmax that is a
/// sum of two squares; other slots stay 0 and are never read.
template <class F>
std::vector<double> radial_values(std::int64_t kmax, F&& f, unsigned workers) {
  std::vector<char> used(static_cast<std::size_t>(kmax + 1), 0);
  const auto m = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(kmax))));
  for (std::int64_t i = 0; i <= m; ++i)
    for (std::int64_t j = i; i * i + j * j <= kmax; ++j) used[static_cast<std::size_t>(i * i + j * j)] = 1;
  std::vector<std::int64_t> ks;
  for (std::int64_t k = 0; k <= kmax; ++k)
    if (used[static_cast<std::size_t>(k)]) ks.push_back(k);
  std::vector<double> out(static_cast<std::size_t>(kmax + 1), 0.0);
  parallel_for(ks.size(), workers, [&](std::size_t i) {
    out[static_cast<std::size_t>(ks[i])] = f(std::sqrt(static_cast<double>(ks[i])));
  });
  return out;
}

CoeffTable radial_table(std::string kind, double R, double param, int trunc_N,
                        const std::vector<double>& by_norm) {
  CoeffTable table;
  table.kind = std::move(kind);
  table.R = R;
  table.param = param;
  table.trunc_N = trunc_N;
  const std::int64_t N2 = static_cast<std::int64_t>(trunc_N) * trunc_N;
  for (int n1 = -trunc_N; n1 <= trunc_N; ++n1)
    for (int n2 = -trunc_N; n2 <= trunc_N; ++n2) {
      const std::int64_t k = static_cast<std::int64_t>(n1) * n1 + static_cast<std::int64_t>(n2) * n2;
      if (k <= N2) table.entries.push_back({n1, n2, {by_norm[static_cast<std::size_t>(k)], 0.0}});
    }
  return table;
}

void check_trunc(int trunc_N) {
  if (trunc_N < 1) throw_invalid("truncation radius must be positive");
  if (trunc_N > kMaxTruncN) throw_range("truncation radius exceeds 4096");
}

/// (2 R' / pi) * int_N^inf r^-2 |phi_hat(|delta| r)|^2 dr, an upper-envelope
/// estimate of sum_{|j| > N} |a_j|^2 (J_1^2(s) <= 2/(pi s) asymptotically).
double a_tail(double R, double delta, int N, const BumpSpec& bump) {
  const double ad = std::abs(delta);
  // phi_hat is below 1e-10 past 60, so the integrand is negligible beyond.
  const double r_end = std::max(static_cast<double>(N), 60.0 / ad);
  const double width = 1.0 / ad;
  const GaussRule& rule = gauss_legendre(20);
  double sum = 0.0;
  for (double left = N; left < r_end; left += width) {
    const double right = std::min(left + width, r_end);
    sum += integrate_gauss(
        [&](double r) {
          const double v = bump_fourier(ad * r, bump);
          return v * v / (r * r);
        },
        left, right, rule);
  }
  return 2.0 * (R + delta) / kPi * sum;
}

}  // namespace

double chi_hat_disk(double R, double xi1, double xi2) {
  check_radius(R, "chi_hat_disk");
  return disk_transform_radial(R, frequency_norm(xi1, xi2, "chi_hat_disk"));
}

double chi_hat_annulus_exact(double R, double t, double xi1, double xi2) {
  check_ring(R, t, "chi_hat_annulus_exact");
  const double rho = frequency_norm(xi1, xi2, "chi_hat_annulus_exact");
  return disk_transform_radial(R + t, rho) - disk_transform_radial(R - t, rho);
}

double chi_hat_annulus_asymptotic(double R, double t, double xi1, double xi2) {
  check_ring(R, t, "chi_hat_annulus_asymptotic");
  const double rho = frequency_norm(xi1, xi2, "chi_hat_annulus_asymptotic");
  return 2.0 / kPi * std::sqrt(R) * std::pow(rho, -1.5) *
         std::sin(-2.0 * kPi * R * rho + 0.75 * kPi) * std::sin(2.0 * kPi * t * rho);
}

std::complex<double> a_delta(int n1, int n2, double R, double delta, const BumpSpec& bump) {
  check_radius(R, "a_delta");
  if (!(std::abs(delta) < 1.0) || delta == 0.0) throw_invalid("a_delta: need 0 < |delta| < 1");
  if (R + delta <= 0.0) throw_invalid("a_delta: R + delta must be positive");
  const double rho = std::hypot(static_cast<double>(n1), static_cast<double>(n2));
  return {a_radial(R, delta, rho, bump), 0.0};
}

std::complex<double> CoeffTable::entry(int n1, int n2) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), std::pair{n1, n2},
                                   [](const CoeffEntry& e, std::pair<int, int> key) {
                                     return std::pair{e.n1, e.n2} < key;
                                   });
  if (it == entries.end() || it->n1 != n1 || it->n2 != n2)
    throw_range("CoeffTable: frequency outside the truncation disk");
  return it->value;
}

double CoeffTable::energy() const {
  long double s = 0.0L;
  for (const auto& e : entries) s += std::norm(e.value);
  return static_cast<double>(s);
}

std::string CoeffTable::to_csv() const {
  std::string out = "n1,n2,re,im\n";
  char buf[96];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", e.n1, e.n2, e.value.real(),
                  e.value.imag());
    out += buf;
  }
  return out;
}

CoeffTable annulus_coeff_table(double R, double t, int trunc_N, unsigned workers) {
  check_ring(R, t, "annulus_coeff_table");
  check_trunc(trunc_N);
  const std::int64_t N2 = static_cast<std::int64_t>(trunc_N) * trunc_N;
  auto values = radial_values(
      N2,
      [&](double rho) {
        return rho == 0.0 ? 0.0 : disk_transform_radial(R + t, rho) - disk_transform_radial(R - t, rho);
      },
      workers);
  CoeffTable table = radial_table("annulus", R, t, trunc_N, values);
  // (4R/pi) int_N^inf r^-2 sin^2(2 pi t r) dr with the oscillating part
  // integrated by parts once.
  const double N = trunc_N;
  table.tail = 4.0 * R / kPi *
               (0.5 / N + std::sin(4.0 * kPi * t * N) / (8.0 * kPi * t * N * N));
  return table;
}

CoeffTable a_delta_table(double R, double delta, int trunc_N, const BumpSpec& bump,
                         unsigned workers) {
  a_delta(0, 1, R, delta, bump);  // argument checks
  check_trunc(trunc_N);
  const std::int64_t N2 = static_cast<std::int64_t>(trunc_N) * trunc_N;
  auto values = radial_values(
      N2, [&](double rho) { return a_radial(R, delta, rho, bump); }, workers);
  CoeffTable table = radial_table("a_delta", R, delta, trunc_N, values);
  table.tail = a_tail(R, delta, trunc_N, bump);
  return table;
}

CoeffTable b_delta_table(double R, double delta, int trunc_N, int conv_N, const BumpSpec& bump,
                         unsigned workers) {
  a_delta(0, 1, R, delta, bump);
  check_trunc(trunc_N);
  if (conv_N < 2 * trunc_N) throw_invalid("b_delta_table: conv_N must be at least 2 * trunc_N");
  const std::int64_t M = static_cast<std::int64_t>(conv_N) + trunc_N;
  if (M * M > (std::int64_t{1} << 27)) throw_range("b_delta_table: conv_N too large");

  const std::vector<double> a = radial_values(
      M * M, [&](double rho) { return a_radial(R, delta, rho, bump); }, workers);

  // a is radial, so b is invariant under the lattice symmetries: compute
  // the octant 0 <= n2 <= n1 and mirror.
  std::vector<std::pair<int, int>> octant;
  const std::int64_t N2 = static_cast<std::int64_t>(trunc_N) * trunc_N;
  for (int n1 = 0; n1 <= trunc_N; ++n1)
    for (int n2 = 0; n2 <= n1 && static_cast<std::int64_t>(n1) * n1 + n2 * n2 <= N2; ++n2)
      octant.emplace_back(n1, n2);

  const std::int64_t C = conv_N;
  const std::int64_t C2 = C * C;
  std::vector<std::int64_t> half_width(static_cast<std::size_t>(C + 1));
  for (std::int64_t j1 = 0; j1 <= C; ++j1) {
    auto h = static_cast<std::int64_t>(std::sqrt(static_cast<double>(C2 - j1 * j1)));
    while (j1 * j1 + (h + 1) * (h + 1) <= C2) ++h;
    while (h > 0 && j1 * j1 + h * h > C2) --h;
    half_width[static_cast<std::size_t>(j1)] = h;
  }

  std::vector<double> b_oct(octant.size());
  parallel_for(octant.size(), workers, [&](std::size_t idx) {
    const std::int64_t n1 = octant[idx].first, n2 = octant[idx].second;
    long double total = 0.0L;
    for (std::int64_t j1 = -C; j1 <= C; ++j1) {
      const std::int64_t h = half_width[static_cast<std::size_t>(std::abs(j1))];
      const std::int64_t d1 = n1 - j1;
      double row = 0.0;
      for (std::int64_t j2 = -h; j2 <= h; ++j2) {
        const std::int64_t d2 = n2 - j2;
        row += a[static_cast<std::size_t>(j1 * j1 + j2 * j2)] *
               a[static_cast<std::size_t>(d1 * d1 + d2 * d2)];
      }
      total += row;
    }
    b_oct[idx] = static_cast<double>(total);
  });

  std::vector<double> by_pair(static_cast<std::size_t>((trunc_N + 1) * (trunc_N + 1)), 0.0);
  for (std::size_t i = 0; i < octant.size(); ++i) {
    const auto [n1, n2] = octant[i];
    by_pair[static_cast<std::size_t>(n1 * (trunc_N + 1) + n2)] = b_oct[i];
    by_pair[static_cast<std::size_t>(n2 * (trunc_N + 1) + n1)] = b_oct[i];
  }
  CoeffTable table;
  table.kind = "b_delta";
  table.R = R;
  table.param = delta;
  table.trunc_N = trunc_N;
  table.conv_N = conv_N;
  for (int n1 = -trunc_N; n1 <= trunc_N; ++n1)
    for (int n2 = -trunc_N; n2 <= trunc_N; ++n2) {
      if (static_cast<std::int64_t>(n1) * n1 + static_cast<std::int64_t>(n2) * n2 > N2) continue;
      const double v = by_pair[static_cast<std::size_t>(std::abs(n1) * (trunc_N + 1) + std::abs(n2))];
      table.entries.push_back({n1, n2, {v, 0.0}});
    }
  table.tail = a_tail(R, delta, conv_N, bump);
  return table;
}

ParsevalReport parseval_check(ParsevalMode mode, double R, double t_or_delta, int trunc_N,
                              int grid_m, unsigned workers) {
  check_trunc(trunc_N);
  if (grid_m < 2 * trunc_N)
    throw_invalid("parseval_check: grid_m must be at least 2 * trunc_N to avoid aliasing");
  ParsevalReport rep;
  rep.mode = mode;
  rep.R = R;
  rep.param = t_or_delta;
  rep.trunc_N = trunc_N;
  rep.grid_m = grid_m;

  const auto m = static_cast<std::size_t>(grid_m);
  std::vector<long double> rows(m, 0.0L);
  if (mode == ParsevalMode::AnnulusM2) {
    const CoeffTable c = annulus_coeff_table(R, t_or_delta, trunc_N, workers);
    rep.coeff_sum = c.energy();
    rep.tail = c.tail;
    const DomainSpec ring = DomainSpec::annulus(t_or_delta);
    parallel_for(m, workers, [&](std::size_t i) {
      long double s = 0.0L;
      for (std::size_t j = 0; j < m; ++j) {
        const ShiftVec x(static_cast<double>(i) / grid_m, static_cast<double>(j) / grid_m);
        const double d = disc(ring, R, x).value;
        s += static_cast<long double>(d) * d;
      }
      rows[i] = s;
    });
  } else {
    const CoeffTable b = b_delta_table(R, t_or_delta, trunc_N, 2 * trunc_N, {}, workers);
    rep.coeff_sum = b.energy();
    // Tail of sum |b_n|^2 beyond trunc_N from the |n|^-3 envelope fitted on
    // the outermost eighth of the table.
    const double inner = trunc_N * 7.0 / 8.0;
    long double ring_sum = 0.0L;
    std::size_t ring_n = 0;
    for (const auto& e : b.entries) {
      const double r = std::hypot(e.n1, e.n2);
      if (r > inner) {
        ring_sum += std::norm(e.value) * std::pow(r / trunc_N, 6.0);
        ++ring_n;
      }
    }
    const double mean_edge = ring_n ? static_cast<double>(ring_sum / ring_n) : 0.0;
    rep.tail = 0.5 * kPi * mean_edge * trunc_N * trunc_N;

    MollifiedParams params;
    params.delta = t_or_delta;
    const MollifiedDiskField field(R, params);
    parallel_for(m, workers, [&](std::size_t i) {
      long double s = 0.0L;
      for (std::size_t j = 0; j < m; ++j) {
        const ShiftVec x(static_cast<double>(i) / grid_m, static_cast<double>(j) / grid_m);
        const long double d = field.value(x);
        s += d * d * d * d;
      }
      rows[i] = s;
    });
  }
  long double total = 0.0L;
  for (long double r : rows) total += r;
  rep.grid_value = static_cast<double>(total / (static_cast<long double>(m) * m));
  rep.rel_gap = std::abs(rep.grid_value - rep.coeff_sum) / rep.grid_value;
  rep.rel_gap_with_tail = std::abs(rep.grid_value - rep.coeff_sum - rep.tail) / rep.grid_value;
  return rep;
}

}  // namespace latdisc

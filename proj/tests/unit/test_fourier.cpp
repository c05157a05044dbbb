#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "core/discrepancy.hpp"
#include "core/error.hpp"
#include "core/fourier.hpp"
#include "oracles.hpp"

using namespace latdisc;

TEST_SUITE("fourier") {

TEST_CASE("disk transform against a polar quadrature oracle") {
  for (double xi : {0.1, 0.7, 1.3}) {
    const double ref = oracle::disk_transform_polar(3.0, xi);
    CHECK(std::abs(chi_hat_disk(3.0, xi, 0.0) - ref) <= 1e-10);
  }
  // Radial: depends on |xi| only.
  CHECK(chi_hat_disk(7.0, 3.0, 4.0) == doctest::Approx(chi_hat_disk(7.0, 0.0, 5.0)).epsilon(1e-15));
  CHECK(chi_hat_disk(7.0, 5.0, 0.0) == doctest::Approx(chi_hat_disk(7.0, -5.0, 0.0)).epsilon(1e-15));
}

TEST_CASE("annulus transform is the difference of disks") {
  const double R = 50.0, t = 0.1;
  const double ex = chi_hat_annulus_exact(R, t, 2.0, 1.0);
  CHECK(ex == doctest::Approx(chi_hat_disk(R + t, 2.0, 1.0) - chi_hat_disk(R - t, 2.0, 1.0)));
}

TEST_CASE("asymptotic annulus transform error envelope") {
  double worst = 0.0;
  for (double R : {50.0, 100.0, 200.0})
    for (double t : {0.01, 0.1})
      for (double xi = 2.0; xi <= 100.0; xi *= 1.013) {
        const double err = std::abs(chi_hat_annulus_exact(R, t, xi, 0.0) - chi_hat_annulus_asymptotic(R, t, xi, 0.0));
        worst = std::max(worst, err / (t * std::pow(R, -0.5) * std::pow(xi, -1.5)));
      }
  MESSAGE("fitted constant = " << worst);
  CHECK(worst <= 10.0);
}

TEST_CASE("asymptotic transform has the right sign where it dominates") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int compared = 0, agree = 0;
  for (int i = 0; i < 4000; ++i) {
    const double R = 50.0 + 150.0 * u(rng), t = 0.01 + 0.2 * u(rng), xi = 2.0 + 98.0 * u(rng);
    const double asym = chi_hat_annulus_asymptotic(R, t, xi, 0.0);
    const double envelope = 10.0 * t * std::pow(R, -0.5) * std::pow(xi, -1.5);
    if (std::abs(asym) <= 2.0 * envelope) continue;
    ++compared;
    if (std::signbit(asym) == std::signbit(chi_hat_annulus_exact(R, t, xi, 0.0))) ++agree;
  }
  REQUIRE(compared > 100);
  CHECK(agree >= 0.9 * compared);
}

TEST_CASE("a_delta zero frequency and product form") {
  const double R = 40.0, delta = 0.15;
  CHECK(a_delta(0, 0, R, delta).real() == doctest::Approx(std::numbers::pi * (2 * delta * R + delta * delta)));
  const std::complex<double> a = a_delta(3, -2, R, delta);
  CHECK(a.imag() == 0.0);
  const double mag = std::hypot(3.0, 2.0);
  CHECK(a.real() == doctest::Approx(chi_hat_disk(R + delta, 3.0, -2.0) * bump_fourier(delta * mag)).epsilon(1e-14));
  // Negative delta smooths the smaller disk.
  CHECK(a_delta(0, 0, R, -delta).real() == doctest::Approx(std::numbers::pi * (-2 * delta * R + delta * delta)));
}

TEST_CASE("a_delta matches the discrete transform of the mollified field") {
  // 128 x 128 shifts at R = 12, delta = R^{-1/2}; the coefficients decay
  // fast enough that aliasing stays below the tolerance.
  const double R = 12.0, delta = 1.0 / std::sqrt(R);
  const int m = 128;
  MollifiedParams p;
  p.delta = delta;
  const MollifiedDiskField field(R, p);
  std::vector<double> values(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) values[i * m + j] = field.value(ShiftVec(double(i) / m, double(j) / m));
  for (auto [n1, n2] : {std::pair{0, 0}, {1, 0}, {1, 2}, {3, -1}, {5, 5}}) {
    std::complex<double> sum = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double phase = -2.0 * std::numbers::pi * (n1 * i + n2 * j) / m;
        sum += values[i * m + j] * std::polar(1.0, phase);
      }
    sum /= double(m) * m;
    const std::complex<double> a = a_delta(n1, n2, R, delta);
    CHECK(std::abs(sum - a) <= 1e-7);
  }
}

TEST_CASE("coefficient table layout") {
  const CoeffTable t = annulus_coeff_table(30.0, 0.1, 6);
  CHECK(t.kind == "annulus");
  CHECK(t.trunc_N == 6);
  std::size_t expected = 0;
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b) expected += a * a + b * b <= 36;
  CHECK(t.entries.size() == expected);
  CHECK(std::is_sorted(t.entries.begin(), t.entries.end(), [](const CoeffEntry& x, const CoeffEntry& y) {
    return std::pair(x.n1, x.n2) < std::pair(y.n1, y.n2);
  }));
  CHECK(t.entry(0, 0) == 0.0);
  CHECK(t.entry(3, 4).real() == doctest::Approx(chi_hat_annulus_exact(30.0, 0.1, 3.0, 4.0)));
  CHECK_THROWS_AS(t.entry(5, 5), Error);
  const std::string csv = t.to_csv();
  CHECK(csv.rfind("n1,n2,re,im\n", 0) == 0);
  CHECK_THROWS_AS(annulus_coeff_table(30.0, 0.1, kMaxTruncN + 1), Error);
}

TEST_CASE("b_delta is the self-convolution of a_delta") {
  const double R = 16.0, delta = 0.25;
  const int trunc = 4, conv = 8;
  const CoeffTable a = a_delta_table(R, delta, conv);
  const CoeffTable b = b_delta_table(R, delta, trunc, conv);
  for (const CoeffEntry& e : b.entries) {
    std::complex<double> sum = 0.0;
    for (const CoeffEntry& j : a.entries) {
      sum += j.value * a_delta(e.n1 - j.n1, e.n2 - j.n2, R, delta);
    }
    CHECK(std::abs(e.value - sum) <= 1e-10 * (1.0 + std::abs(sum)));
  }
  CHECK(b.conv_N == conv);
  CHECK(b.tail >= 0.0);
  CHECK_THROWS_AS(b_delta_table(R, delta, 8, 12), Error);
}

TEST_CASE("b_delta split-regime ratios stay bounded at small R") {
  for (double R : {16.0, 64.0}) {
    const double delta = 1.0 / std::sqrt(R);
    const int trunc = static_cast<int>(2 * std::sqrt(R));
    const CoeffTable b = b_delta_table(R, delta, trunc, 2 * trunc);
    double low = 0.0, high = 0.0;
    for (const CoeffEntry& e : b.entries) {
      const double n = std::hypot(e.n1, e.n2);
      if (n == 0.0) continue;
      if (n <= std::sqrt(R)) low = std::max(low, std::abs(e.value) * n / R);
      else high = std::max(high, std::abs(e.value) * n * n * n / (R * R));
    }
    MESSAGE("R = " << R << ": low " << low << ", high " << high);
    CHECK(low < 10.0);
    CHECK(high < 10.0);
  }
}

TEST_CASE("Parseval for the annulus at small scale") {
  const ParsevalReport r64 = parseval_check(ParsevalMode::AnnulusM2, 10.0, 0.2, 64, 256);
  const ParsevalReport r128 = parseval_check(ParsevalMode::AnnulusM2, 10.0, 0.2, 128, 256);
  CHECK(r64.rel_gap <= 0.05);
  CHECK(r128.rel_gap <= r64.rel_gap);
  CHECK(r128.coeff_sum >= r64.coeff_sum);
  CHECK(r64.grid_value == r128.grid_value);
  CHECK(r64.rel_gap_with_tail <= r64.rel_gap);
  CHECK_THROWS_AS(parseval_check(ParsevalMode::AnnulusM2, 10.0, 0.2, 64, 100), Error);
}

TEST_CASE("Parseval for the fourth moment of the mollified disk") {
  const ParsevalReport r = parseval_check(ParsevalMode::MollifiedM4, 16.0, 0.25, 32, 64);
  CHECK(r.rel_gap <= 1e-6);
}

}  // TEST_SUITE

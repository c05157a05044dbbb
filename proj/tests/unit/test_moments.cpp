#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/discrepancy.hpp"
#include "core/error.hpp"
#include "core/moments.hpp"

using namespace latdisc;

TEST_SUITE("moments") {

TEST_CASE("grid estimate is the plain mean over the shift grid") {
  const DomainSpec d = DomainSpec::ellipse(1.3, 0.9);
  const int m = 8;
  long double sum = 0.0L;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double v = disc(d, 25.0, ShiftVec(double(i) / m, double(j) / m)).value;
      sum += static_cast<long double>(v) * v;
    }
  const MomentEstimate e = moment_estimate(d, 25.0, 2.0, EstimatorConfig::grid(m));
  CHECK(e.estimate == doctest::Approx(static_cast<double>(sum / (m * m))).epsilon(1e-14));
  CHECK(e.stderr_ == 0.0);
  CHECK(e.lp_norm() == doctest::Approx(std::sqrt(e.estimate)));
}

TEST_CASE("single-shift grid is the origin") {
  const MomentEstimate e = moment_estimate(DomainSpec::disk(), 5.0, 1.0, EstimatorConfig::grid(1));
  CHECK(e.estimate == doctest::Approx(std::abs(81.0 - 25.0 * std::numbers::pi)));
}

TEST_CASE("multi-exponent pass and worker count are bit-exact") {
  const DomainSpec d = DomainSpec::disk();
  const std::vector<double> ps{1.0, 2.0, 4.0, 6.0};
  for (const EstimatorConfig& est : {EstimatorConfig::grid(16), EstimatorConfig::monte_carlo(3000, 5)}) {
    const auto multi = moment_estimates(d, 91.5, ps, est, 3);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const MomentEstimate one = moment_estimate(d, 91.5, ps[i], est, 1);
      CHECK(multi[i].estimate == one.estimate);
      CHECK(multi[i].stderr_ == one.stderr_);
    }
  }
}

TEST_CASE("Monte Carlo is seeded and reports a standard error") {
  const DomainSpec d = DomainSpec::annulus(0.2);
  const auto a = moment_estimate(d, 50.0, 2.0, EstimatorConfig::monte_carlo(5000, 11));
  const auto b = moment_estimate(d, 50.0, 2.0, EstimatorConfig::monte_carlo(5000, 11), 4);
  const auto c = moment_estimate(d, 50.0, 2.0, EstimatorConfig::monte_carlo(5000, 12));
  CHECK(a.estimate == b.estimate);
  CHECK(a.estimate != c.estimate);
  CHECK(a.stderr_ > 0.0);
  // Two seeds agree within their errors; the grid agrees too.
  CHECK(std::abs(a.estimate - c.estimate) <= 5.0 * std::hypot(a.stderr_, c.stderr_));
  const auto g = moment_estimate(d, 50.0, 2.0, EstimatorConfig::grid(128));
  CHECK(std::abs(a.estimate - g.estimate) <= 5.0 * a.stderr_ + 0.02 * g.estimate);
}

TEST_CASE("estimator validation") {
  CHECK_THROWS_AS(EstimatorConfig::monte_carlo(10, 1).validate(), Error);
  CHECK_THROWS_AS(EstimatorConfig::grid(0).validate(), Error);
  CHECK_THROWS_AS(moment_estimate(DomainSpec::disk(), 10.0, 0.5, EstimatorConfig::grid(4)), Error);
  CHECK(EstimatorConfig::grid(4).label() == "grid");
  CHECK(EstimatorConfig::monte_carlo(200, 1).label() == "mc");
}

TEST_CASE("sweep order, t rule and per-cell failures") {
  const auto table = sweep(DomainSpec::annulus(0.5), {4.0, 16.0, 64.0}, {2.0, 4.0}, EstimatorConfig::grid(8), 1,
                           TRule::power_law(-0.5));
  REQUIRE(table.cells.size() == 6);
  CHECK(table.cells[0].moment.R == 4.0);
  CHECK(table.cells[1].moment.p == 4.0);
  CHECK(table.cells[2].moment.domain.thickness() == doctest::Approx(0.25));
  CHECK(table.cells[5].moment.domain.thickness() == doctest::Approx(0.125));
  for (const auto& c : table.cells) CHECK(c.ok);

  // t = 0.9 R^0 is fine; a radius below 1 fails without sinking the rest.
  const auto mixed = sweep(DomainSpec::disk(), {0.5, 10.0}, {2.0}, EstimatorConfig::grid(4));
  CHECK_FALSE(mixed.cells[0].ok);
  CHECK_FALSE(mixed.cells[0].error.empty());
  CHECK(mixed.cells[1].ok);
  CHECK(TRule::fixed(0.25).describe() == "fixed:0.25");
  CHECK(TRule::power_law(-0.5).describe() == "power:-0.5");
}

TEST_CASE("power-law fit recovers exact exponents") {
  std::vector<double> radii{10.0, 20.0, 40.0, 80.0}, values;
  for (double R : radii) values.push_back(3.0 * std::pow(R, 1.5));
  const ScalingFit f = fit_power_law(radii, values);
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.stderr_slope < 1e-10);

  values.clear();
  for (double R : radii) values.push_back(2.0 * R * R * std::log(R));
  const ScalingFit g = fit_power_law(radii, values, FitMode::LogCorrected, 2.0);
  CHECK(std::abs(g.slope) < 1e-12);
  CHECK(g.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(fit_power_law({1.0, 2.0}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(fit_power_law({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}), Error);
}

TEST_CASE("annulus regimes") {
  // theta = 2/3: R^{1 - 2 theta} = R^{-1/3}.
  CHECK(annulus_regime(1000.0, 0.05, 2.0 / 3.0, 2.0) == "thin");
  CHECK(annulus_regime(1000.0, 0.5, 2.0 / 3.0, 2.0) == "thick_p_lt_4");
  CHECK(annulus_regime(1000.0, 0.5, 2.0 / 3.0, 4.0) == "thick_p_ge_4");
  CHECK(annulus_regime_for_power_law(2.0 / 3.0, -0.5, 2.0) == "thin");
  CHECK(annulus_regime_for_power_law(2.0 / 3.0, -0.25, 6.0) == "thick_p_ge_4");
  CHECK(annulus_regime_for_power_law(0.75, -0.5, 2.0) == "boundary");
  CHECK_THROWS_AS(annulus_regime(10.0, 0.1, 0.4, 2.0), Error);
}

TEST_CASE("envelope report rows and exclusions") {
  EnvelopeConfig cfg;
  const auto disk = sweep(DomainSpec::disk(), {64.0, 128.0, 256.0}, {2.0, 4.0}, EstimatorConfig::grid(16));
  const EnvelopeReport r = envelope_report(disk, cfg);
  bool saw_linear = false, saw_fourth = false;
  for (const auto& row : r.rows) {
    saw_linear |= row.bound == "second_moment_linear";
    saw_fourth |= row.bound == "fourth_moment_r2logr";
    CHECK(row.ratio == doctest::Approx(row.measured / row.envelope));
  }
  CHECK(saw_linear);
  CHECK(saw_fourth);
  CHECK_FALSE(r.summaries.empty());

  // A fixed-thickness annulus cannot use the p >= 4 branch.
  const auto ring = sweep(DomainSpec::annulus(0.5), {64.0, 128.0}, {4.0}, EstimatorConfig::grid(8));
  EnvelopeConfig fixed;
  fixed.t_rule = TRule::fixed(0.5);
  const EnvelopeReport q = envelope_report(ring, fixed);
  bool excluded = false;
  for (const auto& row : q.rows) excluded |= row.excluded && !row.note.empty();
  CHECK(excluded);
}

TEST_CASE("annulus second moment tracks the area") {
  const auto ring = sweep(DomainSpec::annulus(0.5), {256.0, 512.0}, {2.0}, EstimatorConfig::grid(64), 1,
                          TRule::power_law(-0.5));
  for (const auto& c : ring.cells) {
    const double area = 4.0 * std::numbers::pi * c.moment.R * c.moment.domain.thickness();
    CHECK(std::abs(c.moment.estimate - area) / area <= 0.15);
  }
}

TEST_CASE("count histogram") {
  const CountHistogram h = count_histogram(40.0, 0.1, 4000, 3);
  std::uint64_t total = 0;
  for (auto f : h.frequency) total += f;
  CHECK(total == 4000);
  CHECK(h.lambda == doctest::Approx(4.0 * std::numbers::pi * 40.0 * 0.1));
  // The mean count over uniform shifts is the area.
  CHECK(std::abs(h.mean - h.lambda) <= 5.0 * h.stderr_mean);
  CHECK(h.tv_distance >= 0.0);
  CHECK(h.tv_distance <= 1.0);
  CHECK_THROWS_AS(count_histogram(40.0, 0.1, 999, 3), Error);
  const CountHistogram again = count_histogram(40.0, 0.1, 4000, 3, 4);
  CHECK(again.frequency == h.frequency);
}

}  // TEST_SUITE

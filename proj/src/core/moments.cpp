#include "core/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "core/discrepancy.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/random.hpp"

namespace latdisc {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kMcBlock = 1024;

long double abs_pow(long double d, double p) {
  const long double a = std::fabs(d);
  if (p == std::floor(p) && p >= 1.0 && p <= 16.0) {
    long double r = a;
    for (int i = 1; i < static_cast<int>(p); ++i) r *= a;
    return r;
  }
  return std::pow(a, static_cast<long double>(p));
}

void check_exponents(const std::vector<double>& ps) {
  if (ps.empty()) throw_invalid("need at least one exponent");
  for (double p : ps)
    if (!(p >= 1.0) || !std::isfinite(p)) throw_invalid("moment exponent must be >= 1");
}

void check_theta(double theta) {
  if (!(theta > 0.5 && theta <= 1.0)) throw_invalid("theta must lie in (1/2, 1]");
}

}  // namespace

std::string EstimatorConfig::label() const { return kind == EstimatorKind::Grid ? "grid" : "mc"; }

void EstimatorConfig::validate() const {
  if (kind == EstimatorKind::Grid) {
    if (size < 1) throw_invalid("grid estimator needs m >= 1");
    if (size > 65536) throw_range("grid side exceeds 65536");
  } else {
    if (size < 100) throw_invalid("Monte Carlo estimator needs at least 100 samples");
  }
}

double MomentEstimate::lp_norm() const { return std::pow(estimate, 1.0 / p); }

std::vector<MomentEstimate> moment_estimates(const DomainSpec& domain, double R,
                                             const std::vector<double>& ps,
                                             const EstimatorConfig& est, unsigned workers) {
  check_exponents(ps);
  est.validate();
  domain.validate();
  const std::size_t np = ps.size();
  std::vector<long double> sum(np, 0.0L), sum_sq(np, 0.0L);
  long double n = 0.0L;

  if (est.kind == EstimatorKind::Grid) {
    const std::size_t m = est.size;
    std::vector<long double> rows(m * np, 0.0L);
    parallel_for(m, workers, [&](std::size_t i) {
      const double x1 = static_cast<double>(i) / static_cast<double>(m);
      for (std::size_t j = 0; j < m; ++j) {
        const ShiftVec x(x1, static_cast<double>(j) / static_cast<double>(m));
        const long double d = disc(domain, R, x).value;
        for (std::size_t q = 0; q < np; ++q) rows[i * np + q] += abs_pow(d, ps[q]);
      }
    });
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t q = 0; q < np; ++q) sum[q] += rows[i * np + q];
    n = static_cast<long double>(m) * m;
  } else {
    const std::uint64_t samples = est.size;
    const std::size_t blocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<long double> acc(blocks * np * 2, 0.0L);
    parallel_for(blocks, workers, [&](std::size_t b) {
      BlockRng rng(est.seed, b);
      const std::uint64_t begin = b * kMcBlock;
      const std::uint64_t end = std::min<std::uint64_t>(samples, begin + kMcBlock);
      for (std::uint64_t s = begin; s < end; ++s) {
        const double x1 = rng.uniform();
        const double x2 = rng.uniform();
        const long double d = disc(domain, R, ShiftVec(x1, x2)).value;
        for (std::size_t q = 0; q < np; ++q) {
          const long double y = abs_pow(d, ps[q]);
          acc[(b * np + q) * 2] += y;
          acc[(b * np + q) * 2 + 1] += y * y;
        }
      }
    });
    for (std::size_t b = 0; b < blocks; ++b)
      for (std::size_t q = 0; q < np; ++q) {
        sum[q] += acc[(b * np + q) * 2];
        sum_sq[q] += acc[(b * np + q) * 2 + 1];
      }
    n = static_cast<long double>(samples);
  }

  std::vector<MomentEstimate> out(np);
  for (std::size_t q = 0; q < np; ++q) {
    MomentEstimate& e = out[q];
    e.domain = domain;
    e.R = R;
    e.p = ps[q];
    e.estimator = est;
    const long double mean = sum[q] / n;
    e.estimate = static_cast<double>(mean);
    if (est.kind == EstimatorKind::MonteCarlo) {
      const long double var = std::max(0.0L, (sum_sq[q] / n - mean * mean) * n / (n - 1));
      e.stderr_ = static_cast<double>(std::sqrt(var / n));
    }
  }
  return out;
}

MomentEstimate moment_estimate(const DomainSpec& domain, double R, double p,
                               const EstimatorConfig& est, unsigned workers) {
  return moment_estimates(domain, R, {p}, est, workers).front();
}

double TRule::at(double R) const {
  return kind == Kind::Fixed ? value : std::pow(R, value);
}

std::string TRule::describe() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, kind == Kind::Fixed ? "fixed:%.17g" : "power:%.17g", value);
  return buf;
}

MomentTable sweep(const DomainSpec& domain, const std::vector<double>& radii,
                  const std::vector<double>& ps, const EstimatorConfig& est, unsigned workers,
                  std::optional<TRule> t_rule) {
  if (radii.empty()) throw_invalid("sweep: empty radius list");
  check_exponents(ps);
  est.validate();
  if (t_rule && domain.kind() != DomainKind::Annulus)
    throw_invalid("sweep: a t rule needs an annulus domain");

  MomentTable table;
  table.t_rule = t_rule;
  for (double R : radii) {
    DomainSpec cell_domain = domain;
    std::vector<MomentEstimate> row;
    std::string error;
    try {
      if (t_rule) cell_domain = DomainSpec::annulus(t_rule->at(R), domain.boundary);
      row = moment_estimates(cell_domain, R, ps, est, workers);
    } catch (const Error& e) {
      error = e.what();
    }
    for (std::size_t q = 0; q < ps.size(); ++q) {
      SweepCell cell;
      if (error.empty()) {
        cell.moment = row[q];
      } else {
        cell.ok = false;
        cell.error = error;
        cell.moment.domain = cell_domain;
        cell.moment.R = R;
        cell.moment.p = ps[q];
        cell.moment.estimator = est;
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

ScalingFit fit_power_law(const std::vector<double>& radii, const std::vector<double>& values,
                         FitMode mode, double s) {
  if (radii.size() != values.size()) throw_invalid("fit: size mismatch");
  if (std::set<double>(radii.begin(), radii.end()).size() < 3)
    throw_invalid("fit: need at least three distinct radii");
  ScalingFit fit;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw_invalid("fit: values must be positive");
    if (!(radii[i] > 1.0)) throw_invalid("fit: radii must exceed 1");
    const double lx = std::log(radii[i]);
    double ly = std::log(values[i]);
    if (mode == FitMode::LogCorrected) ly -= s * lx + std::log(lx);
    fit.points.emplace_back(lx, ly);
  }
  const double n = static_cast<double>(fit.points.size());
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : fit.points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (auto [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (auto [x, y] : fit.points) {
    const double r = y - (fit.intercept + fit.slope * x);
    sse += r * r;
  }
  fit.sse = sse;
  fit.sst = syy;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  fit.stderr_slope = n > 2.0 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return fit;
}

ScalingFit scaling_fit(const MomentTable& table, double p, FitMode mode, double s) {
  std::vector<double> radii, values;
  for (const auto& cell : table.cells) {
    if (!cell.ok || cell.moment.p != p) continue;
    radii.push_back(cell.moment.R);
    values.push_back(cell.moment.estimate);
  }
  return fit_power_law(radii, values, mode, s);
}

void EnvelopeConfig::validate() const {
  check_theta(theta);
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw_invalid("epsilon must be positive");
  if (t_rule.kind == TRule::Kind::PowerLaw && !(t_rule.value < 0.0))
    throw_invalid("power-law exponent alpha must be negative");
  if (t_rule.kind == TRule::Kind::Fixed && !(t_rule.value > 0.0 && t_rule.value < 1.0))
    throw_invalid("fixed t must lie in (0, 1)");
}

std::string annulus_regime(double R, double t, double theta, double p) {
  check_theta(theta);
  if (!(R > 0.0) || !(t > 0.0)) throw_invalid("annulus_regime: R and t must be positive");
  if (std::pow(R, 1.0 - 2.0 * theta) >= t) return "thin";
  return p < 4.0 ? "thick_p_lt_4" : "thick_p_ge_4";
}

std::string annulus_regime_for_power_law(double theta, double alpha, double p) {
  check_theta(theta);
  const double gap = (1.0 - 2.0 * theta) - alpha;
  if (gap == 0.0) return "boundary";
  if (gap > 0.0) return "thin";
  return p < 4.0 ? "thick_p_lt_4" : "thick_p_ge_4";
}

EnvelopeReport envelope_report(const MomentTable& table, const EnvelopeConfig& config) {
  config.validate();
  EnvelopeReport rep;
  for (const auto& cell : table.cells) {
    if (!cell.ok) continue;
    const MomentEstimate& m = cell.moment;
    const double R = m.R, p = m.p;
    const double moment = m.estimate, norm = m.lp_norm();
    auto add = [&](std::string bound, double measured, double envelope) -> EnvelopeRow& {
      EnvelopeRow row;
      row.bound = std::move(bound);
      row.domain = m.domain.describe();
      row.R = R;
      row.t = m.domain.thickness();
      row.p = p;
      row.measured = measured;
      row.envelope = envelope;
      row.ratio = measured / envelope;
      rep.rows.push_back(row);
      return rep.rows.back();
    };

    if (m.domain.kind() != DomainKind::Annulus) {
      add("lp_lower_sqrt_r", norm, std::sqrt(R));
      if (p == 2.0) add("second_moment_linear", moment, R);
      if (p == 4.0) add("fourth_moment_r2logr", moment, R * R * std::log(R));
      continue;
    }

    const double t = m.domain.thickness();
    const double theta = config.theta;
    const std::string regime = annulus_regime(R, t, theta, p);
    double envelope = 0.0;
    std::string note;
    bool refuse = false;
    if (regime == "thin") {
      envelope = std::pow(R * t, 1.0 / p) * std::pow(R, theta * (p - 2.0) / p);
    } else if (regime == "thick_p_lt_4") {
      envelope = std::sqrt(R) * std::pow(t, (4.0 - p) / (2.0 * p));
    } else if (table.t_rule && table.t_rule->kind == TRule::Kind::PowerLaw) {
      envelope = std::pow(R, (theta * (p - 4.0) + 2.0 + config.epsilon) / p);
    } else {
      refuse = true;
      note = "p >= 4 branch is defined only for t = R^alpha";
    }
    EnvelopeRow& row = add("annulus_lp_regime", norm, refuse ? NAN : envelope);
    row.regime = regime;
    const double balance = std::pow(R, 1.0 - 2.0 * theta) / t;
    if (refuse) {
      row.excluded = true;
      row.note = note;
    } else if (std::abs(balance - 1.0) <= kRegimeBoundaryTolerance) {
      row.excluded = true;
      row.note = "boundary - excluded";
    }

    if (p >= 2.0 && p < 4.0)
      add("annulus_lp_hausdorff_young", norm, std::sqrt(R) * std::pow(t, p / (8.0 - 2.0 * p)));
    if (p == 2.0) {
      add("annulus_l2_sqrt_rt", norm, std::sqrt(R * t));
      add("annulus_m2_area", moment, 4.0 * kPi * R * t);
    }
  }

  // Boundedness over the top octave of radii, per (bound, p).
  std::map<std::pair<std::string, double>, std::vector<const EnvelopeRow*>> groups;
  std::vector<std::pair<std::string, double>> order;
  for (const auto& row : rep.rows) {
    if (row.excluded) continue;
    auto key = std::make_pair(row.bound, row.p);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&row);
  }
  for (const auto& key : order) {
    const auto& rows = groups[key];
    double rmax = 0.0;
    for (const auto* r : rows) rmax = std::max(rmax, r->R);
    EnvelopeSummary s;
    s.bound = key.first;
    s.p = key.second;
    s.min_ratio = INFINITY;
    s.max_ratio = -INFINITY;
    for (const auto* r : rows) {
      if (r->R < rmax / 2.0) continue;
      ++s.cells;
      s.min_ratio = std::min(s.min_ratio, r->ratio);
      s.max_ratio = std::max(s.max_ratio, r->ratio);
    }
    s.bounded = s.min_ratio > 0.0 && s.max_ratio / s.min_ratio <= kBoundedSpread;
    rep.summaries.push_back(s);
  }
  return rep;
}

CountHistogram count_histogram(double R, double t, std::uint64_t shifts, std::uint64_t seed,
                               unsigned workers) {
  if (shifts < 1000) throw_invalid("count_histogram: need at least 1000 shifts");
  const DomainSpec ring = DomainSpec::annulus(t);
  if (!(t < R)) throw_invalid("count_histogram: need t < R");

  const std::size_t blocks = (shifts + kMcBlock - 1) / kMcBlock;
  std::vector<std::vector<std::uint64_t>> per_block(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    BlockRng rng(seed, b);
    const std::uint64_t begin = b * kMcBlock;
    const std::uint64_t end = std::min<std::uint64_t>(shifts, begin + kMcBlock);
    auto& f = per_block[b];
    for (std::uint64_t s = begin; s < end; ++s) {
      const double x1 = rng.uniform();
      const double x2 = rng.uniform();
      const auto c = count(ring, R, ShiftVec(x1, x2)).count;
      if (c >= f.size()) f.resize(c + 1, 0);
      ++f[c];
    }
  });

  CountHistogram h;
  h.R = R;
  h.t = t;
  h.shifts = shifts;
  h.seed = seed;
  for (const auto& f : per_block) {
    if (f.size() > h.frequency.size()) h.frequency.resize(f.size(), 0);
    for (std::size_t k = 0; k < f.size(); ++k) h.frequency[k] += f[k];
  }
  const double n = static_cast<double>(shifts);
  long double s1 = 0.0L, s2 = 0.0L;
  for (std::size_t k = 0; k < h.frequency.size(); ++k) {
    s1 += static_cast<long double>(k) * h.frequency[k];
    s2 += static_cast<long double>(k) * k * h.frequency[k];
  }
  h.mean = static_cast<double>(s1 / n);
  h.variance = static_cast<double>((s2 / n - (s1 / n) * (s1 / n)) * n / (n - 1.0));
  h.stderr_mean = std::sqrt(std::max(0.0, h.variance) / n);
  h.lambda = static_cast<double>(measure_extended(ring, R));

  const std::size_t kmax = std::max<std::size_t>(
      h.frequency.size(),
      static_cast<std::size_t>(h.lambda + 20.0 * std::sqrt(h.lambda) + 20.0));
  double diff = 0.0, covered = 0.0;
  for (std::size_t k = 0; k < kmax; ++k) {
    const double pk = std::exp(-h.lambda + static_cast<double>(k) * std::log(h.lambda) -
                               std::lgamma(static_cast<double>(k) + 1.0));
    const double ek = k < h.frequency.size() ? static_cast<double>(h.frequency[k]) / n : 0.0;
    diff += std::abs(ek - pk);
    covered += pk;
  }
  h.tv_distance = 0.5 * (diff + std::max(0.0, 1.0 - covered));
  return h;
}

}  // namespace latdisc

#include "latdisc/latdisc.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/counting.hpp"
#include "core/discrepancy.hpp"
#include "core/error.hpp"
#include "core/fourier.hpp"
#include "core/moments.hpp"
#include "core/special.hpp"

struct latdisc_coeff_table {
  latdisc::CoeffTable table;
};

struct latdisc_moment_table {
  latdisc::MomentTable table;
};

struct latdisc_envelope_report {
  latdisc::EnvelopeReport report;
};

struct latdisc_histogram {
  latdisc::CountHistogram histogram;
};

namespace {

using namespace latdisc;

thread_local std::string g_last_error;

latdisc_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return LATDISC_INVALID_ARGUMENT;
    case ErrorCode::OutOfRange: return LATDISC_OUT_OF_RANGE;
    case ErrorCode::Internal: return LATDISC_INTERNAL;
  }
  return LATDISC_INTERNAL;
}

template <class F>
latdisc_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return LATDISC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "allocation failed";
    return LATDISC_ALLOCATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LATDISC_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return LATDISC_INTERNAL;
  }
}

template <class... Ptr>
void require(const char* who, const Ptr*... ptrs) {
  if (((ptrs == nullptr) || ...)) throw_invalid(std::string(who) + ": null pointer argument");
}

Boundary to_boundary(latdisc_boundary b) {
  if (b == LATDISC_CLOSED) return Boundary::Closed;
  if (b == LATDISC_OPEN) return Boundary::Open;
  throw_invalid("unknown boundary mode");
}

latdisc_boundary from_boundary(Boundary b) {
  return b == Boundary::Closed ? LATDISC_CLOSED : LATDISC_OPEN;
}

DomainSpec to_domain(const latdisc_domain& d) {
  const Boundary b = to_boundary(d.boundary);
  switch (d.kind) {
    case LATDISC_DISK: return DomainSpec::disk(b);
    case LATDISC_ELLIPSE: return DomainSpec::ellipse(d.a, d.b, b);
    case LATDISC_ANNULUS: return DomainSpec::annulus(d.t, b);
  }
  throw_invalid("unknown domain kind");
}

latdisc_domain from_domain(const DomainSpec& spec) {
  latdisc_domain d{};
  d.boundary = from_boundary(spec.boundary);
  switch (spec.kind()) {
    case DomainKind::Disk:
      d.kind = LATDISC_DISK;
      break;
    case DomainKind::Ellipse:
      d.kind = LATDISC_ELLIPSE;
      d.a = std::get<Ellipse>(spec.shape).a;
      d.b = std::get<Ellipse>(spec.shape).b;
      break;
    case DomainKind::Annulus:
      d.kind = LATDISC_ANNULUS;
      d.t = spec.thickness();
      break;
  }
  return d;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

EstimatorConfig to_estimator(const latdisc_estimator& e) {
  if (e.kind == LATDISC_GRID) return EstimatorConfig::grid(e.size);
  if (e.kind == LATDISC_MONTE_CARLO) return EstimatorConfig::monte_carlo(e.size, e.seed);
  throw_invalid("unknown estimator kind");
}

latdisc_estimator from_estimator(const EstimatorConfig& e) {
  latdisc_estimator out{};
  out.kind = e.kind == EstimatorKind::Grid ? LATDISC_GRID : LATDISC_MONTE_CARLO;
  out.size = e.size;
  out.seed = e.seed;
  return out;
}

TRule to_t_rule(const latdisc_t_rule& r) {
  if (r.kind == LATDISC_T_FIXED) return TRule::fixed(r.value);
  if (r.kind == LATDISC_T_POWER_LAW) return TRule::power_law(r.value);
  throw_invalid("unknown t rule");
}

latdisc_moment from_moment(const MomentEstimate& m) {
  latdisc_moment out{};
  out.domain = from_domain(m.domain);
  out.R = m.R;
  out.p = m.p;
  out.estimator = from_estimator(m.estimator);
  out.estimate = m.estimate;
  out.lp_norm = m.lp_norm();
  out.std_error = m.stderr_;
  return out;
}

latdisc_scaling_fit from_fit(const ScalingFit& f) {
  return {f.slope, f.intercept, f.stderr_slope, f.r_squared, f.sse, f.sst, f.points.size()};
}

latdisc_count_result from_count(const CountResult& c) {
  return {c.count, c.measure, c.boundary_hits};
}

}  // namespace

extern "C" {

const char* latdisc_version(void) { return LATDISC_VERSION; }

const char* latdisc_last_error(void) { return g_last_error.c_str(); }

void latdisc_free_string(char* s) { std::free(s); }

latdisc_status latdisc_domain_parse(const char* text, latdisc_boundary boundary,
                                    latdisc_domain* out) {
  return guard([&] {
    require("latdisc_domain_parse", text, out);
    *out = from_domain(DomainSpec::parse(text, to_boundary(boundary)));
  });
}

latdisc_status latdisc_domain_describe(const latdisc_domain* domain, char** out) {
  return guard([&] {
    require("latdisc_domain_describe", domain, out);
    *out = dup_string(to_domain(*domain).describe());
  });
}

latdisc_status latdisc_count(const latdisc_domain* domain, double R, double x1, double x2,
                             latdisc_count_result* out) {
  return guard([&] {
    require("latdisc_count", domain, out);
    *out = from_count(count(to_domain(*domain), R, ShiftVec(x1, x2)));
  });
}

latdisc_status latdisc_count_bruteforce(const latdisc_domain* domain, double R, double x1,
                                        double x2, latdisc_count_result* out) {
  return guard([&] {
    require("latdisc_count_bruteforce", domain, out);
    *out = from_count(count_bruteforce(to_domain(*domain), R, ShiftVec(x1, x2)));
  });
}

latdisc_status latdisc_gauss_n(double R, uint64_t* out) {
  return guard([&] {
    require("latdisc_gauss_n", out);
    *out = gauss_n(R);
  });
}

latdisc_status latdisc_gauss_n_squared(uint64_t m, uint64_t* out) {
  return guard([&] {
    require("latdisc_gauss_n_squared", out);
    *out = gauss_n_squared(m);
  });
}

latdisc_status latdisc_r2(uint64_t k, uint64_t* out) {
  return guard([&] {
    require("latdisc_r2", out);
    *out = r2(k);
  });
}

latdisc_status latdisc_disc(const latdisc_domain* domain, double R, double x1, double x2,
                            latdisc_disc_sample* out) {
  return guard([&] {
    require("latdisc_disc", domain, out);
    const DiscrepancySample s = disc(to_domain(*domain), R, ShiftVec(x1, x2));
    *out = {s.count, s.measure, s.value, s.boundary_hits};
  });
}

latdisc_status latdisc_disc_annulus_identity_residual(double R, double t, double x1, double x2,
                                                      double* out) {
  return guard([&] {
    require("latdisc_disc_annulus_identity_residual", out);
    *out = disc_annulus_identity_residual(R, t, ShiftVec(x1, x2));
  });
}

latdisc_status latdisc_disc_mollified(const latdisc_domain* domain, double R, double x1,
                                      double x2, double delta, int quad_points, unsigned workers,
                                      double* out) {
  return guard([&] {
    require("latdisc_disc_mollified", domain, out);
    MollifiedParams params;
    params.delta = delta;
    params.quad_points = quad_points;
    *out = disc_mollified(to_domain(*domain), R, ShiftVec(x1, x2), params, workers);
  });
}

latdisc_status latdisc_sandwich_check(const latdisc_domain* domain, double R, double x1,
                                      double x2, double delta, uint64_t samples, uint64_t seed,
                                      int quad_points, latdisc_sandwich_report* out) {
  return guard([&] {
    require("latdisc_sandwich_check", domain, out);
    const SandwichReport r =
        sandwich_check(to_domain(*domain), R, ShiftVec(x1, x2), delta, samples, seed, quad_points);
    latdisc_sandwich_report c{};
    c.samples = r.samples;
    c.pointwise_violations = r.pointwise_violations;
    c.max_pointwise_excess = r.max_pointwise_excess;
    c.d_minus = r.d_minus;
    c.d = r.d;
    c.d_plus = r.d_plus;
    c.margin = r.margin;
    c.sum_ordered = r.sum_ordered;
    c.power2_holds = r.power2_holds;
    c.power4_holds = r.power4_holds;
    c.max_form_holds = r.max_form_holds;
    c.violations = r.violations();
    *out = c;
  });
}

latdisc_status latdisc_bessel_j(int order, double s, double* out) {
  return guard([&] {
    require("latdisc_bessel_j", out);
    *out = bessel_j(order, s);
  });
}

latdisc_status latdisc_bessel_j_zero(int order, int k, double* out) {
  return guard([&] {
    require("latdisc_bessel_j_zero", out);
    *out = bessel_j_zero(order, k);
  });
}

latdisc_status latdisc_bump_value(double r, double* out) {
  return guard([&] {
    require("latdisc_bump_value", out);
    *out = bump_value(r);
  });
}

latdisc_status latdisc_bump_fourier(double rho, double* out) {
  return guard([&] {
    require("latdisc_bump_fourier", out);
    *out = bump_fourier(rho);
  });
}

latdisc_status latdisc_chi_hat_disk(double R, double xi1, double xi2, double* out) {
  return guard([&] {
    require("latdisc_chi_hat_disk", out);
    *out = chi_hat_disk(R, xi1, xi2);
  });
}

latdisc_status latdisc_chi_hat_annulus_exact(double R, double t, double xi1, double xi2,
                                             double* out) {
  return guard([&] {
    require("latdisc_chi_hat_annulus_exact", out);
    *out = chi_hat_annulus_exact(R, t, xi1, xi2);
  });
}

latdisc_status latdisc_chi_hat_annulus_asymptotic(double R, double t, double xi1, double xi2,
                                                  double* out) {
  return guard([&] {
    require("latdisc_chi_hat_annulus_asymptotic", out);
    *out = chi_hat_annulus_asymptotic(R, t, xi1, xi2);
  });
}

latdisc_status latdisc_a_delta(int n1, int n2, double R, double delta, double* re, double* im) {
  return guard([&] {
    require("latdisc_a_delta", re, im);
    const auto v = a_delta(n1, n2, R, delta);
    *re = v.real();
    *im = v.imag();
  });
}

namespace {
latdisc_status make_table(latdisc_coeff_table** out, const auto& build) {
  return guard([&] {
    require("coefficient table", out);
    auto* t = new latdisc_coeff_table{build()};
    *out = t;
  });
}
}  // namespace

latdisc_status latdisc_annulus_coeff_table(double R, double t, int trunc_N, unsigned workers,
                                           latdisc_coeff_table** out) {
  return make_table(out, [&] { return annulus_coeff_table(R, t, trunc_N, workers); });
}

latdisc_status latdisc_a_delta_table(double R, double delta, int trunc_N, unsigned workers,
                                     latdisc_coeff_table** out) {
  return make_table(out, [&] { return a_delta_table(R, delta, trunc_N, {}, workers); });
}

latdisc_status latdisc_b_delta_table(double R, double delta, int trunc_N, int conv_N,
                                     unsigned workers, latdisc_coeff_table** out) {
  return make_table(out, [&] { return b_delta_table(R, delta, trunc_N, conv_N, {}, workers); });
}

latdisc_status latdisc_coeff_table_info(const latdisc_coeff_table* table,
                                        latdisc_coeff_info* out) {
  return guard([&] {
    require("latdisc_coeff_table_info", table, out);
    const CoeffTable& t = table->table;
    *out = {t.R, t.param, t.trunc_N, t.conv_N, t.tail, t.energy(), t.entries.size()};
  });
}

latdisc_status latdisc_coeff_table_entry(const latdisc_coeff_table* table, size_t index, int* n1,
                                         int* n2, double* re, double* im) {
  return guard([&] {
    require("latdisc_coeff_table_entry", table, n1, n2, re, im);
    if (index >= table->table.entries.size()) throw_range("coefficient index out of range");
    const CoeffEntry& e = table->table.entries[index];
    *n1 = e.n1;
    *n2 = e.n2;
    *re = e.value.real();
    *im = e.value.imag();
  });
}

latdisc_status latdisc_coeff_table_lookup(const latdisc_coeff_table* table, int n1, int n2,
                                          double* re, double* im) {
  return guard([&] {
    require("latdisc_coeff_table_lookup", table, re, im);
    const auto v = table->table.entry(n1, n2);
    *re = v.real();
    *im = v.imag();
  });
}

latdisc_status latdisc_coeff_table_csv(const latdisc_coeff_table* table, char** out) {
  return guard([&] {
    require("latdisc_coeff_table_csv", table, out);
    *out = dup_string(table->table.to_csv());
  });
}

void latdisc_coeff_table_free(latdisc_coeff_table* table) { delete table; }

latdisc_status latdisc_parseval_check(latdisc_parseval_mode mode, double R, double t_or_delta,
                                      int trunc_N, int grid_m, unsigned workers,
                                      latdisc_parseval_report* out) {
  return guard([&] {
    require("latdisc_parseval_check", out);
    ParsevalMode m;
    if (mode == LATDISC_PARSEVAL_ANNULUS_M2) m = ParsevalMode::AnnulusM2;
    else if (mode == LATDISC_PARSEVAL_MOLLIFIED_M4) m = ParsevalMode::MollifiedM4;
    else throw_invalid("unknown Parseval mode");
    const ParsevalReport r = parseval_check(m, R, t_or_delta, trunc_N, grid_m, workers);
    *out = {r.coeff_sum, r.grid_value, r.tail, r.rel_gap, r.rel_gap_with_tail};
  });
}

latdisc_status latdisc_moment_estimate(const latdisc_domain* domain, double R, double p,
                                       const latdisc_estimator* est, unsigned workers,
                                       latdisc_moment* out) {
  return guard([&] {
    require("latdisc_moment_estimate", domain, est, out);
    *out = from_moment(moment_estimate(to_domain(*domain), R, p, to_estimator(*est), workers));
  });
}

latdisc_status latdisc_sweep(const latdisc_domain* domain, const double* radii, size_t n_radii,
                             const double* ps, size_t n_ps, const latdisc_estimator* est,
                             const latdisc_t_rule* t_rule, unsigned workers,
                             latdisc_moment_table** out) {
  return guard([&] {
    require("latdisc_sweep", domain, radii, ps, est, out);
    std::optional<TRule> rule;
    if (t_rule) rule = to_t_rule(*t_rule);
    auto* t = new latdisc_moment_table{
        sweep(to_domain(*domain), std::vector<double>(radii, radii + n_radii),
              std::vector<double>(ps, ps + n_ps), to_estimator(*est), workers, rule)};
    *out = t;
  });
}

size_t latdisc_moment_table_size(const latdisc_moment_table* table) {
  return table ? table->table.cells.size() : 0;
}

latdisc_status latdisc_moment_table_cell(const latdisc_moment_table* table, size_t index,
                                         latdisc_moment* out) {
  SweepCell cell;
  const latdisc_status st = guard([&] {
    require("latdisc_moment_table_cell", table, out);
    if (index >= table->table.cells.size()) throw_range("cell index out of range");
    cell = table->table.cells[index];
    *out = from_moment(cell.moment);
  });
  if (st != LATDISC_OK || cell.ok) return st;
  g_last_error = cell.error;
  return LATDISC_INVALID_ARGUMENT;
}

latdisc_status latdisc_moment_table_from_cells(const latdisc_moment* cells, size_t n,
                                               const latdisc_t_rule* t_rule,
                                               latdisc_moment_table** out) {
  return guard([&] {
    require("latdisc_moment_table_from_cells", out);
    if (n > 0) require("latdisc_moment_table_from_cells", cells);
    MomentTable table;
    if (t_rule) table.t_rule = to_t_rule(*t_rule);
    for (size_t i = 0; i < n; ++i) {
      const latdisc_moment& c = cells[i];
      SweepCell cell;
      cell.moment.domain = to_domain(c.domain);
      cell.moment.R = c.R;
      cell.moment.p = c.p;
      cell.moment.estimator = to_estimator(c.estimator);
      cell.moment.estimate = c.estimate;
      cell.moment.stderr_ = c.std_error;
      if (!std::isfinite(c.estimate)) {
        cell.ok = false;
        cell.error = "cell was not computed";
      }
      table.cells.push_back(std::move(cell));
    }
    *out = new latdisc_moment_table{std::move(table)};
  });
}

void latdisc_moment_table_free(latdisc_moment_table* table) { delete table; }

latdisc_status latdisc_scaling_fit_table(const latdisc_moment_table* table, double p,
                                         int log_corrected, double s, latdisc_scaling_fit* out) {
  return guard([&] {
    require("latdisc_scaling_fit_table", table, out);
    *out = from_fit(scaling_fit(table->table, p,
                                log_corrected ? FitMode::LogCorrected : FitMode::Plain, s));
  });
}

latdisc_status latdisc_fit_power_law(const double* radii, const double* values, size_t n,
                                     int log_corrected, double s, latdisc_scaling_fit* out) {
  return guard([&] {
    require("latdisc_fit_power_law", radii, values, out);
    *out = from_fit(fit_power_law(std::vector<double>(radii, radii + n),
                                  std::vector<double>(values, values + n),
                                  log_corrected ? FitMode::LogCorrected : FitMode::Plain, s));
  });
}

latdisc_status latdisc_envelope_report_create(const latdisc_moment_table* table,
                                              const latdisc_envelope_config* config,
                                              latdisc_envelope_report** out) {
  return guard([&] {
    require("latdisc_envelope_report_create", table, config, out);
    EnvelopeConfig c;
    c.theta = config->theta;
    c.epsilon = config->epsilon;
    c.t_rule = to_t_rule(config->t_rule);
    auto* r = new latdisc_envelope_report{envelope_report(table->table, c)};
    *out = r;
  });
}

size_t latdisc_envelope_row_count(const latdisc_envelope_report* report) {
  return report ? report->report.rows.size() : 0;
}

latdisc_status latdisc_envelope_row_at(const latdisc_envelope_report* report, size_t index,
                                       latdisc_envelope_row* out) {
  return guard([&] {
    require("latdisc_envelope_row_at", report, out);
    if (index >= report->report.rows.size()) throw_range("row index out of range");
    const EnvelopeRow& r = report->report.rows[index];
    *out = {r.bound.c_str(), r.domain.c_str(), r.regime.c_str(), r.note.c_str(),
            r.R, r.t, r.p, r.measured, r.envelope, r.ratio, r.excluded};
  });
}

size_t latdisc_envelope_summary_count(const latdisc_envelope_report* report) {
  return report ? report->report.summaries.size() : 0;
}

latdisc_status latdisc_envelope_summary_at(const latdisc_envelope_report* report, size_t index,
                                           latdisc_envelope_summary* out) {
  return guard([&] {
    require("latdisc_envelope_summary_at", report, out);
    if (index >= report->report.summaries.size()) throw_range("summary index out of range");
    const EnvelopeSummary& s = report->report.summaries[index];
    *out = {s.bound.c_str(), s.p, s.cells, s.min_ratio, s.max_ratio, s.bounded};
  });
}

void latdisc_envelope_report_free(latdisc_envelope_report* report) { delete report; }

latdisc_status latdisc_annulus_regime(double R, double t, double theta, double p, char** out) {
  return guard([&] {
    require("latdisc_annulus_regime", out);
    *out = dup_string(annulus_regime(R, t, theta, p));
  });
}

latdisc_status latdisc_annulus_regime_for_power_law(double theta, double alpha, double p,
                                                    char** out) {
  return guard([&] {
    require("latdisc_annulus_regime_for_power_law", out);
    *out = dup_string(annulus_regime_for_power_law(theta, alpha, p));
  });
}

latdisc_status latdisc_count_histogram(double R, double t, uint64_t shifts, uint64_t seed,
                                       unsigned workers, latdisc_histogram** out) {
  return guard([&] {
    require("latdisc_count_histogram", out);
    auto* h = new latdisc_histogram{count_histogram(R, t, shifts, seed, workers)};
    *out = h;
  });
}

latdisc_status latdisc_histogram_info_get(const latdisc_histogram* h,
                                          latdisc_histogram_info* out) {
  return guard([&] {
    require("latdisc_histogram_info_get", h, out);
    const CountHistogram& c = h->histogram;
    *out = {c.R,    c.t,        c.shifts,      c.seed,   c.frequency.size(),
            c.mean, c.variance, c.stderr_mean, c.lambda, c.tv_distance};
  });
}

latdisc_status latdisc_histogram_frequency(const latdisc_histogram* h, size_t k, uint64_t* out) {
  return guard([&] {
    require("latdisc_histogram_frequency", h, out);
    if (k >= h->histogram.frequency.size()) throw_range("histogram bin out of range");
    *out = h->histogram.frequency[k];
  });
}

void latdisc_histogram_free(latdisc_histogram* h) { delete h; }

}  // extern "C"

// latdisc command-line front end. Talks to the library only through the C API.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cache.hpp"
#include "latdisc/latdisc.h"
#include "output.hpp"

namespace latdisc_cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCache = 3;

class Failure : public std::runtime_error {
 public:
  Failure(int exit_code, const std::string& what) : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

void check(latdisc_status st) {
  if (st == LATDISC_OK) return;
  const int code = st == LATDISC_INVALID_ARGUMENT || st == LATDISC_OUT_OF_RANGE ? kExitInvalid
                                                                                  : kExitInternal;
  throw Failure(code, latdisc_last_error());
}

[[noreturn]] void invalid(const std::string& what) { throw Failure(kExitInvalid, what); }

struct Options {
  unsigned workers = 1;
  std::string format = "csv";
  std::string out;
  std::string cache;
  std::uint64_t seed = 1;
  bool reproducible = false;
  bool verify_cache = false;

  std::string domain = "disk";
  std::string boundary = "closed";
  std::vector<double> radius;
  double r_min = 0.0;
  double r_max = 0.0;
  int r_steps = 0;
  std::vector<std::string> shift;
  std::uint64_t grid = 0;
  std::uint64_t mc = 0;
  std::vector<double> p{2.0};
  double theta = 2.0 / 3.0;
  double epsilon = 0.01;
  std::optional<double> alpha;
  int trunc_n = 32;
  int conv_n = 0;
  std::optional<double> delta;
  std::string kind = "annulus";
  std::string mode = "table";
  int fig = 2;
  int samples = 0;
  std::uint64_t shifts = 10000;
  int quad_points = 64;
};

struct Shift {
  double x1 = 0.0;
  double x2 = 0.0;
};

Shift parse_shift(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) invalid("shift must be given as x1,x2");
  try {
    std::size_t used1 = 0, used2 = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    Shift s{std::stod(a, &used1), std::stod(b, &used2)};
    if (used1 != a.size() || used2 != b.size()) throw std::invalid_argument(text);
    return s;
  } catch (const std::logic_error&) {
    invalid("cannot parse shift '" + text + "'");
  }
}

std::vector<Shift> shifts_of(const Options& o, std::vector<Shift> fallback = {{0.0, 0.0}}) {
  if (o.shift.empty()) return fallback;
  std::vector<Shift> out;
  for (const auto& s : o.shift) out.push_back(parse_shift(s));
  return out;
}

/// --radius list, or a geometric ladder from --r-min/--r-max/--r-steps.
std::vector<double> radii_of(const Options& o) {
  if (!o.radius.empty()) return o.radius;
  if (o.r_steps < 1 || !(o.r_min > 0.0) || !(o.r_max >= o.r_min))
    invalid("give --radius, or --r-min, --r-max and --r-steps");
  if (o.r_steps == 1) return {o.r_min};
  std::vector<double> out;
  const double l0 = std::log2(o.r_min), l1 = std::log2(o.r_max);
  for (int i = 0; i < o.r_steps; ++i)
    out.push_back(i + 1 == o.r_steps ? o.r_max : std::exp2(l0 + (l1 - l0) * i / (o.r_steps - 1)));
  return out;
}

std::vector<double> linear_radii(double lo, double hi, int n) {
  if (n < 1 || !(lo >= 1.0) || !(hi >= lo)) invalid("need 1 <= r-min <= r-max and samples >= 1");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return out;
}

latdisc_boundary boundary_of(const Options& o) {
  if (o.boundary == "closed") return LATDISC_CLOSED;
  if (o.boundary == "open") return LATDISC_OPEN;
  invalid("--boundary must be closed or open");
}

/// The domain; a bare "annulus" is allowed when --alpha supplies t = R^alpha.
latdisc_domain domain_of(const Options& o) {
  latdisc_domain d{};
  if (o.domain == "annulus") {
    if (!o.alpha) invalid("--domain annulus needs a half-thickness (annulus:t) or --alpha");
    check(latdisc_domain_parse("annulus:0.5", boundary_of(o), &d));
    return d;
  }
  check(latdisc_domain_parse(o.domain.c_str(), boundary_of(o), &d));
  return d;
}

std::string describe(const latdisc_domain& d) {
  char* s = nullptr;
  check(latdisc_domain_describe(&d, &s));
  std::string out(s);
  latdisc_free_string(s);
  return out;
}

std::optional<latdisc_t_rule> t_rule_of(const Options& o, const latdisc_domain& d) {
  if (!o.alpha) return std::nullopt;
  if (d.kind != LATDISC_ANNULUS) invalid("--alpha applies to annulus domains only");
  return latdisc_t_rule{LATDISC_T_POWER_LAW, *o.alpha};
}

latdisc_estimator estimator_of(const Options& o) {
  if (o.grid && o.mc) invalid("choose one of --grid and --mc");
  if (o.mc) return {LATDISC_MONTE_CARLO, o.mc, o.seed};
  return {LATDISC_GRID, o.grid ? o.grid : 64, 0};
}

std::string boundary_name(latdisc_boundary b) { return b == LATDISC_CLOSED ? "closed" : "open"; }

class Runner {
 public:
  Runner(const Options& o, std::string command, Cache& cache)
      : o_(o), command_(std::move(command)), cache_(cache) {}

  Table run();
  Json config() const;

 private:
  Table count_or_disc(bool with_value);
  Table moments(bool fits);
  Table envelope();
  Table fourier();
  Table figures();
  Table histogram();

  std::vector<latdisc_moment> moment_cells(const latdisc_domain& d,
                                           const std::vector<double>& radii,
                                           const std::vector<double>& ps,
                                           const latdisc_estimator& est,
                                           const std::optional<latdisc_t_rule>& rule,
                                           std::vector<std::string>& errors);
  void verify(const std::string& key, bool same) const {
    if (!same) throw CacheCorrupt("cache verification failed for " + key);
  }

  const Options& o_;
  std::string command_;
  Cache& cache_;
};

Json Runner::config() const {
  Json c = Json::object();
  c["domain"] = o_.domain;
  c["boundary"] = o_.boundary;
  if (!o_.radius.empty()) {
    Json r = Json::array();
    for (double x : o_.radius) r.push_back(format_double(x));
    c["radius"] = r;
  }
  if (o_.r_steps) {
    c["r_min"] = format_double(o_.r_min);
    c["r_max"] = format_double(o_.r_max);
    c["r_steps"] = o_.r_steps;
  }
  if (!o_.shift.empty()) c["shift"] = o_.shift;
  if (command_ == "moment" || command_ == "sweep" || command_ == "envelope") {
    const latdisc_estimator e = estimator_of(o_);
    c["estimator"] = e.kind == LATDISC_GRID ? "grid" : "mc";
    c["m_or_samples"] = e.size;
    Json p = Json::array();
    for (double x : o_.p) p.push_back(format_double(x));
    c["p"] = p;
  }
  if (o_.alpha) c["alpha"] = format_double(*o_.alpha);
  if (command_ == "envelope") {
    c["theta"] = format_double(o_.theta);
    c["epsilon"] = format_double(o_.epsilon);
  }
  if (command_ == "fourier") {
    c["kind"] = o_.kind;
    c["mode"] = o_.mode;
    c["trunc_n"] = o_.trunc_n;
    if (o_.conv_n) c["conv_n"] = o_.conv_n;
    if (o_.grid) c["grid"] = o_.grid;
  }
  if (o_.delta) c["delta"] = format_double(*o_.delta);
  if (command_ == "figures") {
    c["fig"] = o_.fig;
    c["samples"] = o_.samples;
  }
  if (command_ == "histogram") c["shifts"] = o_.shifts;
  c["seed"] = o_.seed;
  c["format"] = o_.format;
  return c;
}

Table Runner::run() {
  if (command_ == "count") return count_or_disc(false);
  if (command_ == "disc") return count_or_disc(true);
  if (command_ == "moment") return moments(false);
  if (command_ == "sweep") return moments(true);
  if (command_ == "envelope") return envelope();
  if (command_ == "fourier") return fourier();
  if (command_ == "figures") return figures();
  if (command_ == "histogram") return histogram();
  invalid("unknown command " + command_);
}

Table Runner::count_or_disc(bool with_value) {
  const latdisc_domain d = domain_of(o_);
  if (o_.alpha) invalid("--alpha is not used by " + command_);
  const std::string dname = describe(d);
  Table t;
  t.columns = {"domain", "boundary", "R", "x1", "x2", "count", "measure"};
  if (with_value) t.columns.push_back("value");
  t.columns.push_back("boundary_hits");

  for (double R : radii_of(o_)) {
    for (const Shift& s : shifts_of(o_)) {
      const std::string key = command_ + "|" + dname + "|" + boundary_name(d.boundary) +
                              "|R=" + encode_double(R) + "|x=" + encode_double(s.x1) + "," +
                              encode_double(s.x2);
      latdisc_disc_sample v{};
      auto compute = [&] {
        latdisc_disc_sample fresh{};
        if (with_value) {
          check(latdisc_disc(&d, R, s.x1, s.x2, &fresh));
        } else {
          latdisc_count_result c{};
          check(latdisc_count(&d, R, s.x1, s.x2, &c));
          fresh = {c.count, c.measure, 0.0, c.boundary_hits};
        }
        return fresh;
      };
      if (auto hit = cache_.lookup(key)) {
        v.count = std::stoull(hit->at("count").get<std::string>());
        v.measure = decode_double(hit->at("measure"));
        v.value = decode_double(hit->at("value"));
        v.boundary_hits = std::stoull(hit->at("boundary_hits").get<std::string>());
        if (o_.verify_cache && Cache::should_verify(key)) {
          const auto f = compute();
          verify(key, f.count == v.count && f.measure == v.measure && f.value == v.value &&
                          f.boundary_hits == v.boundary_hits);
        }
      } else {
        v = compute();
        Json rec = Json::object();
        rec["count"] = std::to_string(v.count);
        rec["measure"] = encode_double(v.measure);
        rec["value"] = encode_double(v.value);
        rec["boundary_hits"] = std::to_string(v.boundary_hits);
        cache_.store(key, rec);
      }
      std::vector<Cell> row{dname, boundary_name(d.boundary), R, s.x1, s.x2, v.count, v.measure};
      if (with_value) row.emplace_back(v.value);
      row.emplace_back(v.boundary_hits);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

std::vector<latdisc_moment> Runner::moment_cells(const latdisc_domain& d,
                                                 const std::vector<double>& radii,
                                                 const std::vector<double>& ps,
                                                 const latdisc_estimator& est,
                                                 const std::optional<latdisc_t_rule>& rule,
                                                 std::vector<std::string>& errors) {
  const std::string dname = rule ? "annulus" : describe(d);
  std::string est_text = est.kind == LATDISC_GRID ? "grid:" + std::to_string(est.size)
                                                  : "mc:" + std::to_string(est.size) + ":" +
                                                        std::to_string(est.seed);
  std::string rule_text = rule ? "|alpha=" + encode_double(rule->value) : "";
  std::vector<latdisc_moment> cells;
  for (double R : radii) {
    std::vector<latdisc_moment> row(ps.size());
    std::vector<std::string> keys(ps.size());
    std::vector<double> missing;
    std::vector<std::size_t> missing_at;
    for (std::size_t q = 0; q < ps.size(); ++q) {
      keys[q] = "moment|" + dname + "|" + boundary_name(d.boundary) + rule_text +
                "|R=" + encode_double(R) + "|p=" + encode_double(ps[q]) + "|" + est_text;
      if (auto hit = cache_.lookup(keys[q])) {
        row[q].domain = d;
        row[q].R = R;
        row[q].p = ps[q];
        row[q].estimator = est;
        if (rule) {
          row[q].domain.t = decode_double(hit->at("t"));
        }
        row[q].estimate = decode_double(hit->at("estimate"));
        row[q].lp_norm = decode_double(hit->at("lp_norm"));
        row[q].std_error = decode_double(hit->at("stderr"));
        if (o_.verify_cache && Cache::should_verify(keys[q])) {
          latdisc_moment fresh{};
          check(latdisc_moment_estimate(&row[q].domain, R, ps[q], &est, o_.workers, &fresh));
          verify(keys[q], fresh.estimate == row[q].estimate && fresh.std_error == row[q].std_error);
        }
      } else {
        missing.push_back(ps[q]);
        missing_at.push_back(q);
      }
    }
    if (!missing.empty()) {
      latdisc_moment_table* table = nullptr;
      check(latdisc_sweep(&d, &R, 1, missing.data(), missing.size(), &est,
                          rule ? &*rule : nullptr, o_.workers, &table));
      for (std::size_t i = 0; i < missing.size(); ++i) {
        latdisc_moment m{};
        const latdisc_status st = latdisc_moment_table_cell(table, i, &m);
        const std::size_t q = missing_at[i];
        row[q] = m;
        if (st != LATDISC_OK) {
          row[q].estimate = NAN;
          row[q].lp_norm = NAN;
          row[q].std_error = NAN;
          errors.push_back("R=" + format_double(R) + " p=" + format_double(ps[q]) + ": " +
                           latdisc_last_error());
          continue;
        }
        Json rec = Json::object();
        rec["t"] = encode_double(m.domain.t);
        rec["estimate"] = encode_double(m.estimate);
        rec["lp_norm"] = encode_double(m.lp_norm);
        rec["stderr"] = encode_double(m.std_error);
        cache_.store(keys[q], rec);
      }
      latdisc_moment_table_free(table);
    }
    cells.insert(cells.end(), row.begin(), row.end());
  }
  return cells;
}

std::vector<Cell> moment_row(const latdisc_moment& m) {
  const bool grid = m.estimator.kind == LATDISC_GRID;
  return {describe(m.domain),
          m.R,
          m.domain.kind == LATDISC_ANNULUS ? m.domain.t : 0.0,
          m.p,
          std::string(grid ? "grid" : "mc"),
          m.estimator.size,
          grid ? std::uint64_t{0} : m.estimator.seed,
          m.estimate,
          m.lp_norm,
          m.std_error};
}

const std::vector<std::string> kMomentColumns = {"domain",  "R",       "t",      "p",
                                                 "estimator", "m_or_samples", "seed",
                                                 "moment",  "lp_norm", "stderr"};

Table Runner::moments(bool fits) {
  const latdisc_domain d = domain_of(o_);
  const auto rule = t_rule_of(o_, d);
  const auto radii = radii_of(o_);
  const latdisc_estimator est = estimator_of(o_);
  std::vector<std::string> errors;
  const auto cells = moment_cells(d, radii, o_.p, est, rule, errors);

  Table t;
  t.columns = kMomentColumns;
  for (const auto& m : cells) t.rows.push_back(moment_row(m));

  if (fits) {
    Json list = Json::array();
    for (double p : o_.p) {
      std::vector<double> rs, vs;
      for (const auto& m : cells)
        if (m.p == p && std::isfinite(m.estimate)) {
          rs.push_back(m.R);
          vs.push_back(m.estimate);
        }
      latdisc_scaling_fit f{};
      Json item = Json::object();
      item["p"] = format_double(p);
      if (latdisc_fit_power_law(rs.data(), vs.data(), rs.size(), 0, 0.0, &f) == LATDISC_OK) {
        item["slope"] = format_double(f.slope);
        item["intercept"] = format_double(f.intercept);
        item["stderr_slope"] = format_double(f.stderr_slope);
        item["r_squared"] = format_double(f.r_squared);
      } else {
        item["error"] = latdisc_last_error();
      }
      list.push_back(item);
    }
    t.extra["fits"] = list;
  }
  if (!errors.empty()) {
    t.extra["errors"] = errors;
  }
  return t;
}

Table Runner::envelope() {
  const latdisc_domain d = domain_of(o_);
  const auto rule = t_rule_of(o_, d);
  const auto radii = radii_of(o_);
  const latdisc_estimator est = estimator_of(o_);
  std::vector<std::string> errors;
  const auto cells = moment_cells(d, radii, o_.p, est, rule, errors);

  latdisc_moment_table* table = nullptr;
  check(latdisc_moment_table_from_cells(cells.data(), cells.size(), rule ? &*rule : nullptr,
                                        &table));
  latdisc_envelope_config cfg{};
  cfg.theta = o_.theta;
  cfg.epsilon = o_.epsilon;
  if (rule) cfg.t_rule = *rule;
  else if (d.kind == LATDISC_ANNULUS) cfg.t_rule = {LATDISC_T_FIXED, d.t};
  else cfg.t_rule = {LATDISC_T_POWER_LAW, -0.5};

  latdisc_envelope_report* rep = nullptr;
  const latdisc_status st = latdisc_envelope_report_create(table, &cfg, &rep);
  latdisc_moment_table_free(table);
  check(st);

  Table t;
  t.columns = {"bound", "domain", "R",     "t",      "p",    "measured",
               "envelope", "ratio", "regime", "excluded", "note"};
  for (std::size_t i = 0; i < latdisc_envelope_row_count(rep); ++i) {
    latdisc_envelope_row r{};
    check(latdisc_envelope_row_at(rep, i, &r));
    t.rows.push_back({std::string(r.bound), std::string(r.domain), r.R, r.t, r.p, r.measured,
                      r.envelope, r.ratio, std::string(r.regime), r.excluded != 0,
                      std::string(r.note)});
  }
  Json summaries = Json::array();
  for (std::size_t i = 0; i < latdisc_envelope_summary_count(rep); ++i) {
    latdisc_envelope_summary s{};
    check(latdisc_envelope_summary_at(rep, i, &s));
    Json item = Json::object();
    item["bound"] = s.bound;
    item["p"] = format_double(s.p);
    item["cells"] = s.cells;
    item["min_ratio"] = format_double(s.min_ratio);
    item["max_ratio"] = format_double(s.max_ratio);
    item["bounded"] = s.bounded != 0;
    summaries.push_back(item);
  }
  latdisc_envelope_report_free(rep);
  t.extra["summaries"] = summaries;
  if (!errors.empty()) t.extra["errors"] = errors;
  return t;
}

Table Runner::fourier() {
  const auto radii = radii_of(o_);
  if (radii.size() != 1) invalid("fourier takes a single --radius");
  const double R = radii.front();
  const double delta = o_.delta.value_or(1.0 / std::sqrt(R));
  double t_half = 0.0;
  if (o_.kind == "annulus") {
    const latdisc_domain d = domain_of(o_);
    if (d.kind != LATDISC_ANNULUS) invalid("--kind annulus needs --domain annulus:t");
    t_half = d.t;
  } else if (o_.kind != "a" && o_.kind != "b") {
    invalid("--kind must be annulus, a or b");
  }

  Table t;
  if (o_.mode == "parseval") {
    if (o_.kind == "a") invalid("Parseval checks use --kind annulus or --kind b");
    const int grid = o_.grid ? static_cast<int>(o_.grid) : 2 * o_.trunc_n;
    latdisc_parseval_report r{};
    const bool ring = o_.kind == "annulus";
    check(latdisc_parseval_check(ring ? LATDISC_PARSEVAL_ANNULUS_M2 : LATDISC_PARSEVAL_MOLLIFIED_M4,
                                 R, ring ? t_half : delta, o_.trunc_n, grid, o_.workers, &r));
    t.columns = {"mode",      "R",          "param", "trunc_N", "grid_m",
                 "coeff_sum", "grid_value", "tail",  "rel_gap", "rel_gap_with_tail"};
    t.rows.push_back({std::string(ring ? "annulus_m2" : "mollified_m4"), R,
                      ring ? t_half : delta, static_cast<std::int64_t>(o_.trunc_n),
                      static_cast<std::int64_t>(grid), r.coeff_sum, r.grid_value, r.tail,
                      r.rel_gap, r.rel_gap_with_tail});
    return t;
  }
  if (o_.mode != "table") invalid("--mode must be table or parseval");

  latdisc_coeff_table* table = nullptr;
  if (o_.kind == "annulus") {
    check(latdisc_annulus_coeff_table(R, t_half, o_.trunc_n, o_.workers, &table));
  } else if (o_.kind == "a") {
    check(latdisc_a_delta_table(R, delta, o_.trunc_n, o_.workers, &table));
  } else {
    const int conv = o_.conv_n ? o_.conv_n : 2 * o_.trunc_n;
    check(latdisc_b_delta_table(R, delta, o_.trunc_n, conv, o_.workers, &table));
  }
  latdisc_coeff_info info{};
  check(latdisc_coeff_table_info(table, &info));
  t.columns = {"n1", "n2", "re", "im"};
  for (std::size_t i = 0; i < info.size; ++i) {
    int n1 = 0, n2 = 0;
    double re = 0.0, im = 0.0;
    check(latdisc_coeff_table_entry(table, i, &n1, &n2, &re, &im));
    t.rows.push_back({static_cast<std::int64_t>(n1), static_cast<std::int64_t>(n2), re, im});
  }
  latdisc_coeff_table_free(table);
  Json meta = Json::object();
  meta["kind"] = o_.kind;
  meta["R"] = format_double(info.R);
  meta["param"] = format_double(info.param);
  meta["trunc_N"] = info.trunc_N;
  meta["conv_N"] = info.conv_N;
  meta["tail"] = format_double(info.tail);
  meta["energy"] = format_double(info.energy);
  t.extra["table"] = meta;
  return t;
}

Table Runner::figures() {
  Table t;
  constexpr double pi = std::numbers::pi;
  if (o_.fig == 2) {
    const double lo = o_.r_min > 0.0 ? o_.r_min : 10000.0;
    const double hi = o_.r_max > 0.0 ? o_.r_max : 100000.0;
    const int n = o_.samples ? o_.samples : 2000;
    t.columns = {"R", "N", "scaled_discrepancy", "within_gauss_bound"};
    for (double R : linear_radii(lo, hi, n)) {
      std::uint64_t N = 0;
      check(latdisc_gauss_n(R, &N));
      const long double diff = static_cast<long double>(N) - std::numbers::pi_v<long double> * R * R;
      const bool ok = std::abs(static_cast<double>(diff)) <= 2.0 * std::sqrt(2.0) * pi * R;
      t.rows.push_back({R, N, static_cast<double>(diff / std::sqrt(static_cast<long double>(R))), ok});
    }
    return t;
  }
  if (o_.fig == 3) {
    const double lo = o_.r_min > 0.0 ? o_.r_min : 10.0;
    const double hi = o_.r_max > 0.0 ? o_.r_max : 1000.0;
    const int n = o_.samples ? o_.samples : 1000;
    const latdisc_domain disk{LATDISC_DISK, 0.0, 0.0, 0.0, LATDISC_CLOSED};
    t.columns = {"x1", "x2", "R", "D", "scaled_discrepancy"};
    for (const Shift& s : shifts_of(o_, {{0.2, 0.4}, {0.5, 0.3}, {0.9, 0.7}})) {
      for (double R : linear_radii(lo, hi, n)) {
        latdisc_disc_sample v{};
        check(latdisc_disc(&disk, R, s.x1, s.x2, &v));
        t.rows.push_back({s.x1, s.x2, R, v.value, v.value / std::sqrt(R)});
      }
    }
    return t;
  }
  invalid("--fig must be 2 or 3");
}

Table Runner::histogram() {
  const latdisc_domain d = domain_of(o_);
  if (d.kind != LATDISC_ANNULUS) invalid("histogram needs --domain annulus:t");
  const auto radii = radii_of(o_);
  if (radii.size() != 1) invalid("histogram takes a single --radius");
  latdisc_histogram* h = nullptr;
  check(latdisc_count_histogram(radii.front(), d.t, o_.shifts, o_.seed, o_.workers, &h));
  latdisc_histogram_info info{};
  check(latdisc_histogram_info_get(h, &info));
  Table t;
  t.columns = {"k", "frequency", "empirical", "poisson"};
  for (std::size_t k = 0; k < info.bins; ++k) {
    std::uint64_t f = 0;
    check(latdisc_histogram_frequency(h, k, &f));
    const double pois = std::exp(-info.lambda + static_cast<double>(k) * std::log(info.lambda) -
                                 std::lgamma(static_cast<double>(k) + 1.0));
    t.rows.push_back({static_cast<std::uint64_t>(k), f,
                      static_cast<double>(f) / static_cast<double>(info.shifts), pois});
  }
  latdisc_histogram_free(h);
  Json s = Json::object();
  s["mean"] = format_double(info.mean);
  s["variance"] = format_double(info.variance);
  s["stderr_mean"] = format_double(info.stderr_mean);
  s["lambda"] = format_double(info.lambda);
  s["tv_distance"] = format_double(info.tv_distance);
  t.extra["summary"] = s;
  return t;
}

void add_shared(CLI::App* sub, Options& o) {
  sub->add_option("--domain", o.domain, "disk | ellipse:a,b | annulus:t");
  sub->add_option("--boundary", o.boundary, "closed | open")->check(CLI::IsMember({"closed", "open"}));
  sub->add_option("--radius", o.radius, "radius or comma-separated radii")->delimiter(',');
  sub->add_option("--r-min", o.r_min, "smallest radius of a range");
  sub->add_option("--r-max", o.r_max, "largest radius of a range");
  sub->add_option("--r-steps", o.r_steps, "number of geometrically spaced radii");
  sub->add_option("--shift", o.shift, "shift x1,x2 (repeatable)");
}

void add_estimator(CLI::App* sub, Options& o) {
  sub->add_option("--grid", o.grid, "m x m grid of shifts");
  sub->add_option("--mc", o.mc, "number of Monte Carlo shifts");
  sub->add_option("--p", o.p, "exponents, comma-separated")->delimiter(',');
  sub->add_option("--alpha", o.alpha, "annulus half-thickness t = R^alpha");
}

int run_cli(int argc, char** argv) {
  Options o;
  CLI::App app{"Lattice-point counts and discrepancy moments for disks, ellipses and annuli"};
  app.set_version_flag("--version", std::string(latdisc_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--workers", o.workers, "worker threads (0 = all cores)");
  app.add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", o.out, "output file (default stdout)");
  app.add_option("--cache", o.cache, "JSON-lines result cache");
  app.add_option("--seed", o.seed, "random seed");
  app.add_flag("--reproducible", o.reproducible, "omit the timestamp from the output header");
  app.add_flag("--verify-cache", o.verify_cache, "recompute about 1% of cache hits and compare");

  auto* count = app.add_subcommand("count", "exact lattice-point counts");
  add_shared(count, o);
  auto* disc = app.add_subcommand("disc", "discrepancy count - area");
  add_shared(disc, o);
  auto* moment = app.add_subcommand("moment", "p-th moments over the shift torus");
  add_shared(moment, o);
  add_estimator(moment, o);
  auto* sweep = app.add_subcommand("sweep", "moments over a range of radii with power-law fits");
  add_shared(sweep, o);
  add_estimator(sweep, o);
  auto* envelope = app.add_subcommand("envelope", "moments against the theoretical envelopes");
  add_shared(envelope, o);
  add_estimator(envelope, o);
  envelope->add_option("--theta", o.theta, "assumed pointwise exponent in (1/2, 1]");
  envelope->add_option("--epsilon", o.epsilon, "epsilon of the p >= 4 annulus envelope");
  auto* fourier = app.add_subcommand("fourier", "Fourier coefficient tables and Parseval checks");
  add_shared(fourier, o);
  fourier->add_option("--kind", o.kind, "annulus | a | b");
  fourier->add_option("--mode", o.mode, "table | parseval");
  fourier->add_option("--trunc-n", o.trunc_n, "truncation radius");
  fourier->add_option("--conv-n", o.conv_n, "convolution radius of the b table (default 2 trunc-n)");
  fourier->add_option("--delta", o.delta, "mollifier scale (default R^-1/2)");
  fourier->add_option("--grid", o.grid, "shift grid side for Parseval checks");
  auto* figures = app.add_subcommand("figures", "plot-ready discrepancy data");
  add_shared(figures, o);
  figures->add_option("--fig", o.fig, "2: N(R) over a radius range; 3: D at fixed shifts");
  figures->add_option("--samples", o.samples, "number of radii");
  auto* histogram = app.add_subcommand("histogram", "annulus counts under random shifts");
  add_shared(histogram, o);
  histogram->add_option("--shifts", o.shifts, "number of random shifts (>= 1000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (const char* env = std::getenv("LATDISC_CACHE"); env && *env) o.cache = env;
    Cache cache(o.cache);
    const std::string command = app.get_subcommands().front()->get_name();
    Runner runner(o, command, cache);
    const Table table = runner.run();
    Header header;
    header.command = command;
    header.config = runner.config();
    if (!o.reproducible) header.created = utc_timestamp();
    const std::string text = render(table, header, o.format == "json" ? Format::Json : Format::Csv);
    if (o.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw Failure(kExitInvalid, "cannot open " + o.out);
      f << text;
    }
    cache.flush();
    if (table.extra.contains("errors")) {
      std::cerr << "latdisc: some cells failed\n";
      return kExitInvalid;
    }
    return kExitOk;
  } catch (const CacheCorrupt& e) {
    std::cerr << "latdisc: " << e.what() << "\n";
    return kExitCache;
  } catch (const Failure& e) {
    std::cerr << "latdisc: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "latdisc: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace
}  // namespace latdisc_cli

int main(int argc, char** argv) { return latdisc_cli::run_cli(argc, argv); }

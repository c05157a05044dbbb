#include "core/counting.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "core/error.hpp"

namespace latdisc {

using exact::Expansion;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

constexpr long double kPiL = std::numbers::pi_v<long double>;

// Relative slack of the double-precision filters. Evaluating the quadratic
// forms below costs at most ~10 roundings, so 1e-14 leaves a wide margin.
constexpr double kFilter = 1e-14;

// Components smaller than this could underflow once squared; predicates
// touching them are settled in rational arithmetic instead.
const double kTiny = std::ldexp(1.0, -450);

cpp_rational to_rational(double x) {
  if (x == 0.0) return cpp_rational(0);
  int e = 0;
  const double m = std::frexp(x, &e);
  const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  e -= 53;
  cpp_int num = mant;
  if (e >= 0) {
    num <<= e;
    return cpp_rational(num);
  }
  cpp_int den = 1;
  den <<= -e;
  return cpp_rational(num, den);
}

cpp_rational to_rational(const Expansion& e) {
  cpp_rational r = 0;
  for (double c : e.components()) r += to_rational(c);
  return r;
}

int sign_of(const cpp_rational& q) { return q.sign(); }

bool has_tiny(const Expansion& e) {
  for (double c : e.components())
    if (std::abs(c) < kTiny) return true;
  return false;
}

std::int64_t floor_i(double x) { return static_cast<std::int64_t>(std::floor(x)); }
std::int64_t ceil_i(double x) { return static_cast<std::int64_t>(std::ceil(x)); }

class CirclePredicate {
 public:
  CirclePredicate(const Expansion& radius, ShiftVec shift)
      : radius_(radius),
        radius_sq_(radius * radius),
        radius_sq_approx_(radius_sq_.estimate()),
        radius_approx_(radius.estimate()),
        x1_(shift.x1()),
        x2_(shift.x2()),
        radius_tiny_(has_tiny(radius)) {}

  double radius_approx() const { return radius_approx_; }

  double half_width(std::int64_t k) const {
    const double v = static_cast<double>(k) - x2_;
    const double h2 = radius_sq_approx_ - v * v;
    return h2 > 0.0 ? std::sqrt(h2) : 0.0;
  }

  int sign(std::int64_t j, std::int64_t k) const {
    const double u = static_cast<double>(j) - x1_;
    const double v = static_cast<double>(k) - x2_;
    const double uu = u * u, vv = v * v;
    const double f = (uu + vv) - radius_sq_approx_;
    const double bound = kFilter * (uu + vv + radius_sq_approx_);
    if (f > bound) return 1;
    if (f < -bound) return -1;

    const Expansion du = Expansion::sum(static_cast<double>(j), -x1_);
    const Expansion dv = Expansion::sum(static_cast<double>(k), -x2_);
    if (radius_tiny_ || has_tiny(du) || has_tiny(dv)) {
      const cpp_rational ru = to_rational(static_cast<double>(j)) - to_rational(x1_);
      const cpp_rational rv = to_rational(static_cast<double>(k)) - to_rational(x2_);
      const cpp_rational rr = to_rational(radius_);
      return sign_of(ru * ru + rv * rv - rr * rr);
    }
    Expansion F = du * du;
    F += dv * dv;
    F -= radius_sq_;
    return F.sign();
  }

 private:
  Expansion radius_;
  Expansion radius_sq_;
  double radius_sq_approx_;
  double radius_approx_;
  double x1_, x2_;
  bool radius_tiny_;
};

class EllipsePredicate {
 public:
  EllipsePredicate(double a, double b, double R, ShiftVec shift)
      : a_(a), b_(b), R_(R), x1_(shift.x1()), x2_(shift.x2()) {
    a_sq_ = Expansion::product(a, a);
    b_sq_ = Expansion::product(b, b);
    const Expansion abR = Expansion::product(a, b).scaled(R);
    rhs_ = abR * abR;
    rhs_approx_ = rhs_.estimate();
  }

  double radius_approx() const { return b_ * R_; }

  double half_width(std::int64_t k) const {
    const double v = (static_cast<double>(k) - x2_) / b_;
    const double h2 = R_ * R_ - v * v;
    return h2 > 0.0 ? a_ * std::sqrt(h2) : 0.0;
  }

  int sign(std::int64_t j, std::int64_t k) const {
    const double u = static_cast<double>(j) - x1_;
    const double v = static_cast<double>(k) - x2_;
    const double t1 = b_ * b_ * (u * u);
    const double t2 = a_ * a_ * (v * v);
    const double f = (t1 + t2) - rhs_approx_;
    const double bound = kFilter * (t1 + t2 + rhs_approx_);
    if (f > bound) return 1;
    if (f < -bound) return -1;

    const Expansion du = Expansion::sum(static_cast<double>(j), -x1_);
    const Expansion dv = Expansion::sum(static_cast<double>(k), -x2_);
    if (has_tiny(du) || has_tiny(dv)) {
      const cpp_rational ru = to_rational(static_cast<double>(j)) - to_rational(x1_);
      const cpp_rational rv = to_rational(static_cast<double>(k)) - to_rational(x2_);
      const cpp_rational ra = to_rational(a_), rb = to_rational(b_), rR = to_rational(R_);
      return sign_of(rb * rb * ru * ru + ra * ra * rv * rv - ra * ra * rb * rb * rR * rR);
    }
    Expansion F = b_sq_ * (du * du);
    F += a_sq_ * (dv * dv);
    F -= rhs_;
    return F.sign();
  }

 private:
  double a_, b_, R_;
  double x1_, x2_;
  Expansion a_sq_, b_sq_, rhs_;
  double rhs_approx_;
};

/// Row sums over a convex region given by an exact sign predicate and an
/// approximate half-width per row. The double-precision endpoints are within
/// one unit of the truth; the predicate settles the final integer range.
template <class Pred>
detail::CircleCount row_sum(const Pred& pred, ShiftVec shift, double extent, bool closed) {
  detail::CircleCount out;
  const double x1 = shift.x1();
  const std::int64_t kmin = floor_i(shift.x2() - extent) - 1;
  const std::int64_t kmax = ceil_i(shift.x2() + extent) + 1;
  for (std::int64_t k = kmin; k <= kmax; ++k) {
    auto inside = [&](std::int64_t j) {
      const int s = pred.sign(j, k);
      return s < 0 || (closed && s == 0);
    };
    const double h = pred.half_width(k);
    const std::int64_t lo_est = ceil_i(x1 - h);
    const std::int64_t hi_est = floor_i(x1 + h);

    std::int64_t lo = lo_est;
    while (inside(lo - 1)) --lo;
    while (lo <= hi_est + 2 && !inside(lo)) ++lo;
    std::int64_t hi = hi_est;
    while (inside(hi + 1)) ++hi;
    while (hi >= lo_est - 2 && !inside(hi)) --hi;

    if (hi >= lo) {
      out.count += static_cast<std::uint64_t>(hi - lo + 1);
      // Boundary points sit right at the ends of the interior run.
      const std::int64_t cand[4] = {lo - 1, lo, hi, hi + 1};
      for (int c = 0; c < 4; ++c) {
        bool dup = false;
        for (int d = 0; d < c; ++d) dup = dup || cand[d] == cand[c];
        if (!dup && pred.sign(cand[c], k) == 0) ++out.boundary_hits;
      }
    } else if (!closed) {
      // An empty open row can still touch the curve.
      for (std::int64_t j = floor_i(x1 - h) - 2; j <= ceil_i(x1 + h) + 2; ++j)
        if (pred.sign(j, k) == 0) ++out.boundary_hits;
    }
  }
  return out;
}

void check_radius(double R, double limit, const char* who) {
  if (!std::isfinite(R) || R < 1.0 || R > limit)
    throw_range(std::string(who) + ": radius out of range [1, " + std::to_string(limit) + "]");
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw_invalid("cannot parse number '" + std::string(s) + "'");
  return v;
}

// ---- brute-force oracle: long double filter, rational fallback -------------

int bf_circle_sign(std::int64_t j, std::int64_t k, ShiftVec s, double R, double t_signed) {
  const long double u = static_cast<long double>(j) - s.x1();
  const long double v = static_cast<long double>(k) - s.x2();
  const long double rad = static_cast<long double>(R) + t_signed;
  const long double f = u * u + v * v - rad * rad;
  const long double mag = u * u + v * v + rad * rad;
  if (f > 1e-16L * mag) return 1;
  if (f < -1e-16L * mag) return -1;
  const cpp_rational ru = to_rational(static_cast<double>(j)) - to_rational(s.x1());
  const cpp_rational rv = to_rational(static_cast<double>(k)) - to_rational(s.x2());
  const cpp_rational rr = to_rational(R) + to_rational(t_signed);
  return sign_of(ru * ru + rv * rv - rr * rr);
}

int bf_ellipse_sign(std::int64_t j, std::int64_t k, ShiftVec s, double a, double b, double R) {
  const long double u = static_cast<long double>(j) - s.x1();
  const long double v = static_cast<long double>(k) - s.x2();
  const long double A = a, B = b, RR = R;
  const long double t1 = B * B * u * u, t2 = A * A * v * v, t3 = A * A * B * B * RR * RR;
  const long double f = t1 + t2 - t3;
  const long double mag = t1 + t2 + t3;
  if (f > 1e-16L * mag) return 1;
  if (f < -1e-16L * mag) return -1;
  const cpp_rational ru = to_rational(static_cast<double>(j)) - to_rational(s.x1());
  const cpp_rational rv = to_rational(static_cast<double>(k)) - to_rational(s.x2());
  const cpp_rational ra = to_rational(a), rb = to_rational(b), rR = to_rational(R);
  return sign_of(rb * rb * ru * ru + ra * ra * rv * rv - ra * ra * rb * rb * rR * rR);
}

// ---- r2 via factorization ---------------------------------------------------

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 pow_mod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, a, m);
    a = mul_mod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 pollard_brent(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    const u64 m = 128;
    u64 r = 1;
    auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) {
      out.push_back(p);
      factor(n / p, out);
      return;
    }
  }
  const u64 d = pollard_brent(n);
  factor(d, out);
  factor(n / d, out);
}

}  // namespace

// ---- ShiftVec / DomainSpec --------------------------------------------------

ShiftVec::ShiftVec(double x1, double x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2)) throw_invalid("ShiftVec: components must be finite");
  auto reduce = [](double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
  };
  x1_ = reduce(x1);
  x2_ = reduce(x2);
}

DomainSpec DomainSpec::disk(Boundary boundary) { return DomainSpec{Disk{}, boundary}; }

DomainSpec DomainSpec::ellipse(double a, double b, Boundary boundary) {
  DomainSpec d{Ellipse{a, b}, boundary};
  d.validate();
  return d;
}

DomainSpec DomainSpec::annulus(double t, Boundary boundary) {
  DomainSpec d{Annulus{t}, boundary};
  d.validate();
  return d;
}

void DomainSpec::validate() const {
  if (const auto* e = std::get_if<Ellipse>(&shape)) {
    const double lo = std::ldexp(1.0, -10), hi = std::ldexp(1.0, 10);
    if (!(e->a >= lo && e->a <= hi && e->b >= lo && e->b <= hi))
      throw_invalid("ellipse semi-axes must lie in [2^-10, 2^10]");
  } else if (const auto* a = std::get_if<Annulus>(&shape)) {
    if (!(a->t > 0.0 && a->t < 1.0)) throw_invalid("annulus half-thickness must lie in (0, 1)");
  }
}

double DomainSpec::thickness() const {
  if (const auto* a = std::get_if<Annulus>(&shape)) return a->t;
  return 0.0;
}

std::string DomainSpec::describe() const {
  switch (kind()) {
    case DomainKind::Disk:
      return "disk";
    case DomainKind::Ellipse: {
      const auto& e = std::get<Ellipse>(shape);
      return "ellipse:" + format_double(e.a) + "," + format_double(e.b);
    }
    case DomainKind::Annulus:
      return "annulus:" + format_double(std::get<Annulus>(shape).t);
  }
  return "?";
}

DomainSpec DomainSpec::parse(std::string_view text, Boundary boundary) {
  if (text == "disk") return disk(boundary);
  if (text.starts_with("ellipse:")) {
    const auto body = text.substr(8);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw_invalid("ellipse domain needs 'ellipse:a,b'");
    return ellipse(parse_double(body.substr(0, comma)), parse_double(body.substr(comma + 1)),
                   boundary);
  }
  if (text.starts_with("annulus:")) return annulus(parse_double(text.substr(8)), boundary);
  throw_invalid("unknown domain '" + std::string(text) + "'");
}

long double measure_extended(const DomainSpec& domain, double R) {
  const long double r = R;
  switch (domain.kind()) {
    case DomainKind::Disk:
      return kPiL * r * r;
    case DomainKind::Ellipse: {
      const auto& e = std::get<Ellipse>(domain.shape);
      return kPiL * static_cast<long double>(e.a) * e.b * r * r;
    }
    case DomainKind::Annulus:
      return 4 * kPiL * r * static_cast<long double>(std::get<Annulus>(domain.shape).t);
  }
  return 0;
}

// ---- counting ---------------------------------------------------------------

namespace detail {

CircleCount count_circle(const Expansion& radius, ShiftVec shift, bool closed) {
  if (radius.sign() < 0) throw_invalid("count_circle: negative radius");
  const CirclePredicate pred(radius, shift);
  return row_sum(pred, shift, pred.radius_approx(), closed);
}

int circle_sign(const Expansion& radius, ShiftVec shift, std::int64_t j, std::int64_t k) {
  return CirclePredicate(radius, shift).sign(j, k);
}

}  // namespace detail

CountResult count(const DomainSpec& domain, double R, ShiftVec shift) {
  check_radius(R, kMaxCountRadius, "count");
  domain.validate();
  const bool closed = domain.boundary == Boundary::Closed;
  CountResult out;
  out.measure = static_cast<double>(measure_extended(domain, R));
  switch (domain.kind()) {
    case DomainKind::Disk: {
      const auto c = detail::count_circle(Expansion(R), shift, closed);
      out.count = c.count;
      out.boundary_hits = c.boundary_hits;
      break;
    }
    case DomainKind::Ellipse: {
      const auto& e = std::get<Ellipse>(domain.shape);
      const EllipsePredicate pred(e.a, e.b, R, shift);
      const auto c = row_sum(pred, shift, pred.radius_approx(), closed);
      out.count = c.count;
      out.boundary_hits = c.boundary_hits;
      break;
    }
    case DomainKind::Annulus: {
      const double t = std::get<Annulus>(domain.shape).t;
      if (t >= R) throw_invalid("count: annulus half-thickness must be below the radius");
      // Closed ring = closed outer disk minus open inner disk, and vice versa.
      const auto outer = detail::count_circle(Expansion::sum(R, t), shift, closed);
      const auto inner = detail::count_circle(Expansion::sum(R, -t), shift, !closed);
      out.count = outer.count - inner.count;
      out.boundary_hits = outer.boundary_hits + inner.boundary_hits;
      break;
    }
  }
  return out;
}

CountResult count_bruteforce(const DomainSpec& domain, double R, ShiftVec shift) {
  check_radius(R, kMaxBruteforceRadius, "count_bruteforce");
  domain.validate();
  const bool closed = domain.boundary == Boundary::Closed;
  CountResult out;
  out.measure = static_cast<double>(measure_extended(domain, R));

  double ex = R + 1.0, ey = R + 1.0;
  if (const auto* e = std::get_if<Ellipse>(&domain.shape)) {
    ex = e->a * R + 1.0;
    ey = e->b * R + 1.0;
  }
  const std::int64_t jmin = floor_i(shift.x1() - ex) - 1, jmax = ceil_i(shift.x1() + ex) + 1;
  const std::int64_t kmin = floor_i(shift.x2() - ey) - 1, kmax = ceil_i(shift.x2() + ey) + 1;

  for (std::int64_t k = kmin; k <= kmax; ++k) {
    for (std::int64_t j = jmin; j <= jmax; ++j) {
      switch (domain.kind()) {
        case DomainKind::Disk: {
          const int s = bf_circle_sign(j, k, shift, R, 0.0);
          if (s == 0) ++out.boundary_hits;
          if (s < 0 || (closed && s == 0)) ++out.count;
          break;
        }
        case DomainKind::Ellipse: {
          const auto& e = std::get<Ellipse>(domain.shape);
          const int s = bf_ellipse_sign(j, k, shift, e.a, e.b, R);
          if (s == 0) ++out.boundary_hits;
          if (s < 0 || (closed && s == 0)) ++out.count;
          break;
        }
        case DomainKind::Annulus: {
          const double t = std::get<Annulus>(domain.shape).t;
          const int so = bf_circle_sign(j, k, shift, R, t);
          const int si = bf_circle_sign(j, k, shift, R, -t);
          if (so == 0) ++out.boundary_hits;
          if (si == 0) ++out.boundary_hits;
          const bool in = closed ? (so <= 0 && si >= 0) : (so < 0 && si > 0);
          if (in) ++out.count;
          break;
        }
      }
    }
  }
  return out;
}

namespace {

// 1 + 4 m + 4 * #{j, k >= 1 : j^2 + k^2 within the bound}, where m is the
// largest integer radius inside and `within(q)` decides q <= bound exactly.
template <class Within>
std::uint64_t count_quadrants(std::int64_t m, double approx_bound, Within within) {
  std::uint64_t quadrant = 0;
  for (std::int64_t j = 1; j <= m; ++j) {
    const std::int64_t jj = j * j;
    const double h2 = approx_bound - static_cast<double>(jj);
    auto mj = static_cast<std::int64_t>(std::floor(std::sqrt(h2 > 0.0 ? h2 : 0.0)));
    while (within(jj + (mj + 1) * (mj + 1))) ++mj;
    while (mj > 0 && !within(jj + mj * mj)) --mj;
    quadrant += static_cast<std::uint64_t>(mj);
  }
  return 1 + 4 * static_cast<std::uint64_t>(m) + 4 * quadrant;
}

}  // namespace

std::uint64_t gauss_n(double R) {
  check_radius(R, kMaxCountRadius, "gauss_n");
  double hi, lo;
  exact::two_product(R, R, hi, lo);
  // q <= R^2 for an integer q < 2^53. q - hi is exact whenever it is small
  // enough for the comparison with lo to matter.
  auto within = [&](std::int64_t q) { return static_cast<double>(q) - hi <= lo; };
  return count_quadrants(static_cast<std::int64_t>(std::floor(R)), hi, within);
}

std::uint64_t gauss_n_squared(std::uint64_t m) {
  if (m > kMaxR2Argument) throw_range("gauss_n_squared: argument exceeds 2^50");
  auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(m)));
  while (root * root > static_cast<std::int64_t>(m)) --root;
  while ((root + 1) * (root + 1) <= static_cast<std::int64_t>(m)) ++root;
  auto within = [&](std::int64_t q) { return q <= static_cast<std::int64_t>(m); };
  return count_quadrants(root, static_cast<double>(m), within);
}

std::uint64_t r2(std::uint64_t k) {
  if (k > kMaxR2Argument) throw_range("r2: argument exceeds 2^50");
  if (k == 0) return 1;
  std::vector<u64> primes;
  factor(k, primes);
  std::sort(primes.begin(), primes.end());
  std::uint64_t product = 1;
  for (std::size_t i = 0; i < primes.size();) {
    std::size_t j = i;
    while (j < primes.size() && primes[j] == primes[i]) ++j;
    const u64 p = primes[i];
    const u64 e = j - i;
    if (p % 4 == 1) product *= e + 1;
    else if (p % 4 == 3 && e % 2 == 1) return 0;
    i = j;
  }
  return 4 * product;
}

}  // namespace latdisc

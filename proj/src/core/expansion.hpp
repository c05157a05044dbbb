#pragma once

// Error-free floating-point transformations and nonoverlapping expansions
// (sums of doubles that represent a real number exactly). Used to decide the
// sign of lattice-point predicates without rounding error.

#include <cmath>
#include <vector>

namespace latdisc::exact {

inline void two_sum(double a, double b, double& s, double& err) {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  err = (a - av) + (b - bv);
}

inline void fast_two_sum(double a, double b, double& s, double& err) {
  s = a + b;
  err = b - (s - a);
}

inline void two_product(double a, double b, double& p, double& err) {
  p = a * b;
  err = std::fma(a, b, -p);
}

/// Components are nonoverlapping, nonzero and sorted by increasing magnitude,
/// so the last component carries the sign of the represented value.
class Expansion {
 public:
  Expansion() = default;
  explicit Expansion(double x) {
    if (x != 0.0) c_.push_back(x);
  }

  static Expansion sum(double a, double b) {
    double s, e;
    two_sum(a, b, s, e);
    Expansion r;
    if (e != 0.0) r.c_.push_back(e);
    if (s != 0.0) r.c_.push_back(s);
    return r;
  }

  static Expansion product(double a, double b) {
    double p, e;
    two_product(a, b, p, e);
    Expansion r;
    if (e != 0.0) r.c_.push_back(e);
    if (p != 0.0) r.c_.push_back(p);
    return r;
  }

  Expansion& operator+=(double b) {
    std::vector<double> out;
    out.reserve(c_.size() + 1);
    double q = b;
    for (double ci : c_) {
      double s, h;
      two_sum(q, ci, s, h);
      if (h != 0.0) out.push_back(h);
      q = s;
    }
    if (q != 0.0) out.push_back(q);
    c_.swap(out);
    return *this;
  }

  Expansion& operator+=(const Expansion& f) {
    for (double fi : f.c_) *this += fi;
    return *this;
  }

  Expansion& operator-=(const Expansion& f) {
    for (double fi : f.c_) *this += -fi;
    return *this;
  }

  friend Expansion operator+(Expansion a, const Expansion& b) { return a += b; }
  friend Expansion operator-(Expansion a, const Expansion& b) { return a -= b; }

  Expansion operator-() const {
    Expansion r(*this);
    for (double& ci : r.c_) ci = -ci;
    return r;
  }

  Expansion scaled(double b) const {
    Expansion r;
    if (c_.empty() || b == 0.0) return r;
    r.c_.reserve(2 * c_.size());
    double q, h;
    two_product(c_[0], b, q, h);
    if (h != 0.0) r.c_.push_back(h);
    for (std::size_t i = 1; i < c_.size(); ++i) {
      double t1, t0, q2;
      two_product(c_[i], b, t1, t0);
      two_sum(q, t0, q2, h);
      if (h != 0.0) r.c_.push_back(h);
      fast_two_sum(t1, q2, q, h);
      if (h != 0.0) r.c_.push_back(h);
    }
    if (q != 0.0) r.c_.push_back(q);
    return r;
  }

  friend Expansion operator*(const Expansion& a, const Expansion& b) {
    Expansion r;
    for (double bi : b.c_) r += a.scaled(bi);
    return r;
  }

  int sign() const {
    if (c_.empty()) return 0;
    return c_.back() > 0.0 ? 1 : -1;
  }

  double estimate() const {
    double s = 0.0;
    for (double ci : c_) s += ci;
    return s;
  }

  const std::vector<double>& components() const { return c_; }

 private:
  std::vector<double> c_;
};

}  // namespace latdisc::exact

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "core/expansion.hpp"

namespace latdisc {

/// A point of the torus R^2 / Z^2; both components are reduced into [0, 1).
class ShiftVec {
 public:
  ShiftVec() = default;
  ShiftVec(double x1, double x2);

  double x1() const { return x1_; }
  double x2() const { return x2_; }

  friend bool operator==(const ShiftVec&, const ShiftVec&) = default;

 private:
  double x1_ = 0.0;
  double x2_ = 0.0;
};

enum class Boundary { Closed, Open };

struct Disk {};
struct Ellipse {
  double a;
  double b;
};
/// Ring R - t <= |y| <= R + t; t is the half-thickness and is not scaled by R.
struct Annulus {
  double t;
};

enum class DomainKind { Disk, Ellipse, Annulus };

struct DomainSpec {
  std::variant<Disk, Ellipse, Annulus> shape = Disk{};
  Boundary boundary = Boundary::Closed;

  static DomainSpec disk(Boundary boundary = Boundary::Closed);
  /// Semi-axes must lie in [2^-10, 2^10].
  static DomainSpec ellipse(double a, double b, Boundary boundary = Boundary::Closed);
  /// Half-thickness must lie in (0, 1).
  static DomainSpec annulus(double t, Boundary boundary = Boundary::Closed);

  /// Accepts "disk", "ellipse:a,b" and "annulus:t".
  static DomainSpec parse(std::string_view text, Boundary boundary = Boundary::Closed);

  DomainKind kind() const { return static_cast<DomainKind>(shape.index()); }
  /// Inverse of parse(); numbers are printed with round-trip precision.
  std::string describe() const;
  /// Annulus half-thickness, 0 for the other kinds.
  double thickness() const;

  void validate() const;
};

struct CountResult {
  std::uint64_t count = 0;
  /// Area of the counted region (pi R^2, pi a b R^2 or 4 pi R t).
  double measure = 0.0;
  /// Lattice points lying exactly on a boundary curve.
  std::uint64_t boundary_hits = 0;
};

inline constexpr double kMaxCountRadius = 33554432.0;   // 2^25
inline constexpr double kMaxBruteforceRadius = 500.0;

/// Exact number of (j, k) in Z^2 with (j - x1, k - x2) in R * domain.
/// Row sums with exact endpoint predicates, O(R).
CountResult count(const DomainSpec& domain, double R, ShiftVec shift);

/// Independent O(R^2) enumeration over the bounding box; R <= 500.
CountResult count_bruteforce(const DomainSpec& domain, double R, ShiftVec shift);

/// N(R) = #{n in Z^2 : |n| <= R}.
std::uint64_t gauss_n(double R);

/// #{n in Z^2 : |n|^2 <= m}, i.e. N(sqrt m) with the root taken exactly;
/// m <= 2^50.
std::uint64_t gauss_n_squared(std::uint64_t m);

inline constexpr std::uint64_t kMaxR2Argument = std::uint64_t{1} << 50;

/// Number of representations of k as a sum of two squares of integers.
std::uint64_t r2(std::uint64_t k);

/// Area of the scaled domain in extended precision.
long double measure_extended(const DomainSpec& domain, double R);

namespace detail {

struct CircleCount {
  std::uint64_t count = 0;
  std::uint64_t boundary_hits = 0;
};

/// Lattice points with |(j, k) - shift| <= radius (closed) or < radius
/// (open), where the radius is given exactly as an expansion.
CircleCount count_circle(const exact::Expansion& radius, ShiftVec shift, bool closed);

/// Sign of |(j, k) - shift|^2 - radius^2, exact.
int circle_sign(const exact::Expansion& radius, ShiftVec shift, std::int64_t j, std::int64_t k);

}  // namespace detail

}  // namespace latdisc

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "core/special.hpp"

namespace latdisc {

/// Fourier transform of the indicator of the disk of radius R at xi != 0:
/// (R / |xi|) J_1(2 pi R |xi|).
double chi_hat_disk(double R, double xi1, double xi2);

/// Transform of the ring R - t <= |y| <= R + t as a difference of two disks.
double chi_hat_annulus_exact(double R, double t, double xi1, double xi2);

/// Leading term (2/pi) R^{1/2} |xi|^{-3/2} sin(-2 pi R |xi| + 3 pi / 4) sin(2 pi t |xi|).
double chi_hat_annulus_asymptotic(double R, double t, double xi1, double xi2);

/// Fourier coefficient at frequency n of the mollified disk discrepancy
/// (smoothing scale |delta|, indicator of the disk of radius R + delta).
/// Real for every n; returned as complex to match the table type.
std::complex<double> a_delta(int n1, int n2, double R, double delta, const BumpSpec& bump = {});

struct CoeffEntry {
  int n1 = 0;
  int n2 = 0;
  std::complex<double> value;
};

struct CoeffTable {
  /// "annulus", "a_delta" or "b_delta".
  std::string kind;
  double R = 0.0;
  /// t for the annulus table, delta for the mollified ones.
  double param = 0.0;
  int trunc_N = 0;
  /// Convolution radius of b_delta tables; 0 otherwise.
  int conv_N = 0;
  /// Estimated contribution of the truncated frequencies to the sum of
  /// squared magnitudes (for b_delta: of the a-coefficients cut from the
  /// convolution).
  double tail = 0.0;
  /// All |n| <= trunc_N, sorted by (n1, n2).
  std::vector<CoeffEntry> entries;

  /// Throws OutOfRange if |n| > trunc_N.
  std::complex<double> entry(int n1, int n2) const;
  /// Sum of |value|^2 over the table.
  double energy() const;
  /// Columns n1,n2,re,im with round-trip precision.
  std::string to_csv() const;
};

inline constexpr int kMaxTruncN = 4096;

/// c_n = chi_hat_annulus_exact(R, t, n) for 0 < |n| <= trunc_N, c_0 = 0.
CoeffTable annulus_coeff_table(double R, double t, int trunc_N, unsigned workers = 1);

/// a_delta on |n| <= trunc_N.
CoeffTable a_delta_table(double R, double delta, int trunc_N, const BumpSpec& bump = {},
                         unsigned workers = 1);

/// b_n = sum over |j| <= conv_N of a_j a_{n-j}, for |n| <= trunc_N: the
/// coefficients of the squared mollified discrepancy.
CoeffTable b_delta_table(double R, double delta, int trunc_N, int conv_N,
                         const BumpSpec& bump = {}, unsigned workers = 1);

enum class ParsevalMode { AnnulusM2, MollifiedM4 };

struct ParsevalReport {
  ParsevalMode mode = ParsevalMode::AnnulusM2;
  double R = 0.0;
  double param = 0.0;
  int trunc_N = 0;
  int grid_m = 0;
  /// Truncated sum of squared coefficients.
  double coeff_sum = 0.0;
  /// Mean over the m x m shift grid of D^2 (annulus) or D_delta^4 (mollified).
  double grid_value = 0.0;
  /// Estimated contribution of the frequencies beyond trunc_N.
  double tail = 0.0;
  /// |grid_value - coeff_sum| / grid_value.
  double rel_gap = 0.0;
  /// Same with the tail estimate added to the coefficient side.
  double rel_gap_with_tail = 0.0;
};

/// Compares both sides of Parseval's identity. Requires grid_m >= 2 trunc_N.
ParsevalReport parseval_check(ParsevalMode mode, double R, double t_or_delta, int trunc_N,
                              int grid_m, unsigned workers = 1);

}  // namespace latdisc

#pragma once

// Straight-line re-derivation of the reconstruction error, kept free of the
// library: plain nested vectors, cubic coefficients from a 4x4 solve in
// absolute time, angle differences folded with atan2.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Channels {
  double dt = 1.0 / 30.0;
  double t0 = 0.0;
  // [frame][joint]
  std::vector<std::vector<double>> theta, phi, theta_dot, phi_dot;
};

/// Solves the 4x4 system by Gaussian elimination with partial pivoting.
inline std::vector<double> solve4(std::vector<std::vector<double>> a, std::vector<double> b) {
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < 4; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(4);
  for (int r = 3; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 4; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

/// A0..A3 with value and slope matched at t0 and t1.
inline std::vector<double> cubic(double t0, double t1, double p0, double v0, double p1, double v1) {
  std::vector<std::vector<double>> a = {
      {1, t0, t0 * t0, t0 * t0 * t0},
      {0, 1, 2 * t0, 3 * t0 * t0},
      {1, t1, t1 * t1, t1 * t1 * t1},
      {0, 1, 2 * t1, 3 * t1 * t1},
  };
  return solve4(a, {p0, v0, p1, v1});
}

inline double eval(const std::vector<double>& c, double t) { return c[0] + c[1] * t + c[2] * t * t + c[3] * t * t * t; }

inline double angle_gap(double a, double b) { return std::fabs(std::atan2(std::sin(a - b), std::cos(a - b))); }

/// Mean error over N * M of the section-wise cubic reconstruction; every
/// section sums its own two end frames.
inline double q_error(const Channels& s, const std::vector<std::size_t>& keys) {
  const std::size_t n = s.theta.size(), m = s.theta[0].size();
  double total = 0;
  for (std::size_t w = 0; w + 1 < keys.size(); ++w) {
    const std::size_t a = keys[w], b = keys[w + 1];
    const double ta = s.t0 + a * s.dt, tb = s.t0 + b * s.dt;
    for (std::size_t j = 0; j < m; ++j) {
      const auto ct = cubic(ta, tb, s.theta[a][j], s.theta_dot[a][j], s.theta[b][j], s.theta_dot[b][j]);
      const auto cp = cubic(ta, tb, s.phi[a][j], s.phi_dot[a][j], s.phi[b][j], s.phi_dot[b][j]);
      for (std::size_t q = 0; q <= b - a; ++q) {
        const double t = ta + q * s.dt;
        total += angle_gap(eval(ct, t), s.theta[a + q][j]) + angle_gap(eval(cp, t), s.phi[a + q][j]);
      }
    }
  }
  return total / static_cast<double>(n * m);
}

}  // namespace oracle

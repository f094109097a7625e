#pragma once

#include "sidql/error.hpp"
#include "sidql/keyframes.hpp"
#include "sidql/spherical.hpp"

#include <array>
#include <string>
#include <vector>

namespace sidql {

/// Cubic matching value and slope at both ends of [t_start, t_end].
///
/// Evaluation runs in the normalised variable u = (t - t_start) / duration
/// through the Hermite basis, which reproduces the end values bit for bit.
struct CubicChannel {
  double p0 = 0.0, v0 = 0.0, p1 = 0.0, v1 = 0.0;
  double t_start = 0.0, t_end = 1.0;

  double duration() const { return t_end - t_start; }

  /// A0..A3 of the polynomial in local time s = t - t_start.
  std::array<double, 4> coefficients() const {
    const double h = duration();
    const double a2 = 3.0 * (p1 - p0) - h * (2.0 * v0 + v1);
    const double a3 = 2.0 * (p0 - p1) + h * (v0 + v1);
    return {p0, v0, a2 / (h * h), a3 / (h * h * h)};
  }

  double at_fraction(double u) const {
    const double u2 = u * u, u3 = u2 * u;
    const double h = duration();
    return (2.0 * u3 - 3.0 * u2 + 1.0) * p0 + (u3 - 2.0 * u2 + u) * h * v0 + (3.0 * u2 - 2.0 * u3) * p1 + (u3 - u2) * h * v1;
  }

  /// d/dt at fraction u.
  double slope_at_fraction(double u) const {
    const double u2 = u * u;
    const double h = duration();
    return ((6.0 * u2 - 6.0 * u) * p0 + (6.0 * u - 6.0 * u2) * p1) / h + (3.0 * u2 - 4.0 * u + 1.0) * v0 + (3.0 * u2 - 2.0 * u) * v1;
  }

  double operator()(double t) const { return at_fraction((t - t_start) / duration()); }
  double slope(double t) const { return slope_at_fraction((t - t_start) / duration()); }
};

inline CubicChannel fit_cubic(double p0, double v0, double p1, double v1, double t0, double t1) {
  if (!(t1 > t0)) throw Error(Errc::DegenerateInterval, "section end must come after its start");
  return {p0, v0, p1, v1, t0, t1};
}

/// Frames first..last of a reconstruction, all joints. Arrays are
/// (last - first + 1) x M, frame-major.
struct Section {
  std::size_t first = 0, last = 0;
  std::size_t joints = 0;
  std::vector<double> theta, phi, theta_dot, phi_dot;

  std::size_t length() const { return last - first + 1; }
  std::size_t at(std::size_t q, std::size_t m) const { return q * joints + m; }
};

/// Angle channels between two keyframes. Azimuth endpoints come from the
/// unwrapped store, so the cubic follows the continuous branch.
inline Section reconstruct_section(const SphericalSequence& sph, std::size_t k0, std::size_t k1) {
  if (!(k0 < k1) || k1 >= sph.frames())
    throw Error(Errc::DegenerateInterval, "section [" + std::to_string(k0) + ", " + std::to_string(k1) + "] is empty or out of range");
  const std::size_t m_joints = sph.joints();
  const std::size_t span = k1 - k0;
  const double t0 = sph.time(k0), t1 = sph.time(k1);
  Section s;
  s.first = k0;
  s.last = k1;
  s.joints = m_joints;
  const std::size_t count = (span + 1) * m_joints;
  s.theta.resize(count);
  s.phi.resize(count);
  s.theta_dot.resize(count);
  s.phi_dot.resize(count);
  for (std::size_t m = 0; m < m_joints; ++m) {
    const std::size_t a = sph.at(k0, m), b = sph.at(k1, m);
    const CubicChannel th = fit_cubic(sph.theta[a], sph.theta_dot[a], sph.theta[b], sph.theta_dot[b], t0, t1);
    const CubicChannel ph = fit_cubic(sph.phi[a], sph.phi_dot[a], sph.phi[b], sph.phi_dot[b], t0, t1);
    for (std::size_t q = 1; q < span; ++q) {
      const double u = static_cast<double>(q) / static_cast<double>(span);
      const std::size_t k = s.at(q, m);
      s.theta[k] = th.at_fraction(u);
      s.phi[k] = ph.at_fraction(u);
      s.theta_dot[k] = th.slope_at_fraction(u);
      s.phi_dot[k] = ph.slope_at_fraction(u);
    }
    // keyframes are copied, not evaluated
    for (auto [q, src] : {std::pair{std::size_t{0}, a}, std::pair{span, b}}) {
      const std::size_t k = s.at(q, m);
      s.theta[k] = sph.theta[src];
      s.phi[k] = sph.phi[src];
      s.theta_dot[k] = sph.theta_dot[src];
      s.phi_dot[k] = sph.phi_dot[src];
    }
  }
  return s;
}

struct RootSection {
  std::vector<Vec3> positions, velocities;
};

/// Componentwise cubic on the root's Cartesian track.
inline RootSection reconstruct_root(const SphericalSequence& sph, std::size_t k0, std::size_t k1) {
  if (!(k0 < k1) || k1 >= sph.frames())
    throw Error(Errc::DegenerateInterval, "section [" + std::to_string(k0) + ", " + std::to_string(k1) + "] is empty or out of range");
  const std::size_t span = k1 - k0;
  const double t0 = sph.time(k0), t1 = sph.time(k1);
  RootSection out;
  out.positions.resize(span + 1);
  out.velocities.resize(span + 1);
  const Vec3 &o0 = sph.root_positions[k0], &o1 = sph.root_positions[k1];
  const Vec3 &d0 = sph.root_velocities[k0], &d1 = sph.root_velocities[k1];
  for (int c = 0; c < 3; ++c) {
    const CubicChannel ch = fit_cubic(o0[c], d0[c], o1[c], d1[c], t0, t1);
    for (std::size_t q = 1; q < span; ++q) {
      const double u = static_cast<double>(q) / static_cast<double>(span);
      out.positions[q][c] = ch.at_fraction(u);
      out.velocities[q][c] = ch.slope_at_fraction(u);
    }
  }
  out.positions.front() = o0;
  out.velocities.front() = d0;
  out.positions.back() = o1;
  out.velocities.back() = d1;
  return out;
}

struct ReconstructedSequence {
  SphericalSequence motion;
  KeyframeSet keyframes;
};

/// Stitches every section together; shared keyframes are written once.
inline ReconstructedSequence reconstruct_full(const SphericalSequence& sph, const KeyframeSet& keys) {
  if (keys.frame_count() != sph.frames())
    throw Error(Errc::InvalidKeyframeSet, "keyframe set is for " + std::to_string(keys.frame_count()) + " frames, sequence has " +
                                              std::to_string(sph.frames()));
  ReconstructedSequence out{sph, keys};
  auto& r = out.motion;
  const auto& idx = keys.indices();
  for (std::size_t w = 0; w + 1 < idx.size(); ++w) {
    const Section s = reconstruct_section(sph, idx[w], idx[w + 1]);
    const RootSection root = reconstruct_root(sph, idx[w], idx[w + 1]);
    for (std::size_t q = 0; q < s.length(); ++q) {
      const std::size_t n = s.first + q;
      for (std::size_t m = 0; m < s.joints; ++m) {
        const std::size_t dst = r.at(n, m), src = s.at(q, m);
        r.theta[dst] = s.theta[src];
        r.phi[dst] = s.phi[src];
        r.theta_dot[dst] = s.theta_dot[src];
        r.phi_dot[dst] = s.phi_dot[src];
      }
      r.root_positions[n] = root.positions[q];
      r.root_velocities[n] = root.velocities[q];
    }
  }
  return out;
}

}  // namespace sidql

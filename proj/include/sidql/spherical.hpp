#pragma once

#include "sidql/error.hpp"
#include "sidql/geometry.hpp"
#include "sidql/motion.hpp"
#include "sidql/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace sidql {

/// |sin(theta)| below this is treated as sitting on the z-axis.
inline constexpr double kPoleThreshold = 1e-6;
/// |cos(phi)| below this makes the fixed-length azimuth rate undefined.
inline constexpr double kMeridianThreshold = 1e-6;

struct SphericalPoint {
  double r = 0.0;
  double theta = 0.0;  // polar angle from +z, [0, pi]
  double phi = 0.0;    // azimuth, (-pi, pi]
};

struct SphericalRate {
  double r_dot = 0.0;
  double theta_dot = 0.0;
  double phi_dot = 0.0;
};

enum class SingularityPolicy {
  Error,     // throw PoleSingularity / MeridianSingularity
  Fallback,  // keep the polar rate, zero the azimuth rate
};

inline SphericalPoint cart_to_sph(const Vec3& p) {
  const double r = p.norm();
  if (!(r > 0.0)) throw Error(Errc::ZeroVector, "cannot express the zero vector in spherical coordinates");
  SphericalPoint s;
  s.r = r;
  s.theta = std::acos(std::clamp(p.z() / r, -1.0, 1.0));
  // on the pole the azimuth is arbitrary; pin it to 0
  s.phi = (p.x() == 0.0 && p.y() == 0.0) ? 0.0 : std::atan2(p.y(), p.x());
  if (s.phi <= -kPi) s.phi = kPi;
  return s;
}

inline Vec3 sph_to_cart(double r, double theta, double phi) {
  const double st = std::sin(theta);
  return {r * st * std::cos(phi), r * st * std::sin(phi), r * std::cos(theta)};
}

inline Vec3 sph_to_cart(const SphericalPoint& s) { return sph_to_cart(s.r, s.theta, s.phi); }

/// Rates of (r, theta, phi) for a point `p` moving with Cartesian velocity
/// `v`, without assuming a fixed radius.
inline SphericalRate velocity_to_sph(const Vec3& p, const Vec3& v, SingularityPolicy policy = SingularityPolicy::Error) {
  const SphericalPoint s = cart_to_sph(p);
  const double st = std::sin(s.theta), ct = std::cos(s.theta);
  const double sp = std::sin(s.phi), cp = std::cos(s.phi);
  SphericalRate out;
  out.r_dot = st * cp * v.x() + st * sp * v.y() + ct * v.z();
  out.theta_dot = (ct * cp * v.x() + ct * sp * v.y() - st * v.z()) / s.r;
  if (std::abs(st) < kPoleThreshold) {
    if (policy == SingularityPolicy::Error)
      throw Error(Errc::PoleSingularity, "azimuth rate undefined on the z-axis");
    out.phi_dot = 0.0;
  } else {
    out.phi_dot = (-sp * v.x() + cp * v.y()) / (s.r * st);
  }
  return out;
}

/// Polar and azimuth rates under the fixed-radius simplification. Always
/// reports singularities; callers choose what to do about them.
inline std::pair<double, double> velocity_to_sph_constrained(const Vec3& p, const Vec3& v) {
  const SphericalPoint s = cart_to_sph(p);
  const double st = std::sin(s.theta), ct = std::cos(s.theta);
  const double sp = std::sin(s.phi), cp = std::cos(s.phi);
  if (std::abs(st) < kPoleThreshold) throw Error(Errc::PoleSingularity, "polar rate undefined on the z-axis");
  if (std::abs(cp) < kMeridianThreshold) throw Error(Errc::MeridianSingularity, "fixed-length azimuth rate divides by cos(phi) = 0");
  const double theta_dot = -v.z() / (s.r * st);
  const double phi_dot = (v.y() * st + v.z() * ct * sp) / (s.r * st * st * cp);
  return {theta_dot, phi_dot};
}

/// Per-joint angle channels of a sequence. Arrays are frame-major (n * M + m);
/// `phi` is unwrapped so each joint's azimuth is continuous over time.
struct SphericalSequence {
  std::string source_id;
  double dt = 1.0 / 30.0;
  double start_time = 0.0;
  std::vector<std::string> joint_names;
  std::vector<int> parents;
  std::vector<double> bone_lengths;
  std::vector<double> theta, phi, theta_dot, phi_dot;
  std::vector<Vec3> root_positions, root_velocities;
  std::size_t singular_samples = 0;

  std::size_t frames() const { return root_positions.size(); }
  std::size_t joints() const { return joint_names.size(); }
  std::size_t at(std::size_t n, std::size_t m) const { return n * joints() + m; }
  double time(std::size_t n) const { return start_time + static_cast<double>(n) * dt; }
};

enum class VelocityForm {
  General,      // full rates, tolerant of small radial motion
  Constrained,  // fixed-radius simplification
};

struct SphericalOptions {
  VelocityForm form = VelocityForm::General;
  SingularityPolicy policy = SingularityPolicy::Fallback;
};

/// Converts parent-relative joint offsets to angle channels. With the
/// fallback policy a sample on the pole reuses the previous azimuth and gets
/// a zero azimuth rate; such samples are counted in `singular_samples`.
inline SphericalSequence sequence_to_spherical(const MotionSequence& seq, const SphericalOptions& opts = {}) {
  seq.check_shape();
  const std::size_t n_frames = seq.frames(), m_joints = seq.joints();
  SphericalSequence out;
  out.source_id = seq.source_id;
  out.dt = seq.dt;
  out.joint_names = seq.joint_names;
  out.parents = seq.parents;
  out.bone_lengths = seq.bone_lengths;
  out.root_positions = seq.root_positions;
  out.root_velocities = seq.root_velocities;
  out.theta.resize(n_frames * m_joints);
  out.phi.resize(n_frames * m_joints);
  out.theta_dot.resize(n_frames * m_joints);
  out.phi_dot.resize(n_frames * m_joints);

  for (std::size_t m = 0; m < m_joints; ++m) {
    double prev_phi = 0.0;
    for (std::size_t n = 0; n < n_frames; ++n) {
      const Vec3 rel = seq.position(n, m) - seq.parent_position(n, m);
      const Vec3 rel_v = seq.velocity(n, m) - seq.parent_velocity(n, m);
      const SphericalPoint s = cart_to_sph(rel);
      const bool pole = std::abs(std::sin(s.theta)) < kPoleThreshold;
      if (pole && opts.policy == SingularityPolicy::Error)
        throw Error(Errc::PoleSingularity, "joint '" + seq.joint_names[m] + "' frame " + std::to_string(n) + " lies on the z-axis");

      SphericalRate rate = velocity_to_sph(rel, rel_v, SingularityPolicy::Fallback);
      if (opts.form == VelocityForm::Constrained && !pole) {
        try {
          std::tie(rate.theta_dot, rate.phi_dot) = velocity_to_sph_constrained(rel, rel_v);
        } catch (const Error&) {
          if (opts.policy == SingularityPolicy::Error) throw;
          ++out.singular_samples;  // meridian: keep the general-form rates
        }
      }

      double phi;
      if (pole) {
        phi = n == 0 ? s.phi : prev_phi;
        rate.phi_dot = 0.0;
        ++out.singular_samples;
      } else if (n == 0) {
        phi = s.phi;
      } else {
        phi = prev_phi + wrap_angle(s.phi - prev_phi);
      }
      prev_phi = phi;
      const std::size_t k = out.at(n, m);
      out.theta[k] = s.theta;
      out.phi[k] = phi;
      out.theta_dot[k] = rate.theta_dot;
      out.phi_dot[k] = rate.phi_dot;
    }
  }
  return out;
}

/// Same as above after checking that every joint exists in `sk` with the
/// recorded bone length.
inline SphericalSequence sequence_to_spherical(const MotionSequence& seq, const Skeleton& sk, const SphericalOptions& opts = {}) {
  for (std::size_t m = 0; m < seq.joints(); ++m) {
    const int j = sk.index_of(seq.joint_names[m]);
    if (j <= 0) throw Error(Errc::ShapeMismatch, "joint '" + seq.joint_names[m] + "' is not a bone of the skeleton");
    const double len = sk.joints[static_cast<std::size_t>(j)].length;
    if (std::abs(len - seq.bone_lengths[m]) > 1e-9 * len)
      throw Error(Errc::ShapeMismatch, "bone length of '" + seq.joint_names[m] + "' differs from the skeleton");
  }
  return sequence_to_spherical(seq, opts);
}

/// Places every joint at its bone length from the parent using the angle
/// channels. Polar angles outside [0, pi] are clamped; the number of clamped
/// samples is written to `clamped` when given.
inline MotionSequence spherical_to_cartesian(const SphericalSequence& sph, std::size_t* clamped = nullptr) {
  MotionSequence out;
  out.source_id = sph.source_id;
  out.dt = sph.dt;
  out.joint_names = sph.joint_names;
  out.parents = sph.parents;
  out.bone_lengths = sph.bone_lengths;
  out.root_positions = sph.root_positions;
  out.root_velocities = sph.root_velocities;
  const std::size_t n_frames = sph.frames(), m_joints = sph.joints();
  out.positions.resize(n_frames * m_joints);
  out.velocities.resize(n_frames * m_joints);
  std::size_t clamp_count = 0;
  for (std::size_t n = 0; n < n_frames; ++n)
    for (std::size_t m = 0; m < m_joints; ++m) {
      const std::size_t k = sph.at(n, m);
      double theta = sph.theta[k];
      if (theta < 0.0 || theta > kPi) {
        theta = std::clamp(theta, 0.0, kPi);
        ++clamp_count;
      }
      const double r = sph.bone_lengths[m];
      const double st = std::sin(theta), ct = std::cos(theta);
      const double sp = std::sin(sph.phi[k]), cp = std::cos(sph.phi[k]);
      const Vec3 e_theta(ct * cp, ct * sp, -st);
      const Vec3 e_phi(-sp, cp, 0.0);
      out.position(n, m) = out.parent_position(n, m) + sph_to_cart(r, theta, sph.phi[k]);
      out.velocity(n, m) = out.parent_velocity(n, m) + r * (sph.theta_dot[k] * e_theta + st * sph.phi_dot[k] * e_phi);
    }
  if (clamped) *clamped = clamp_count;
  return out;
}

}  // namespace sidql

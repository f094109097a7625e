#pragma once

#include "oracle/q_oracle.hpp"
#include "sidql/sidql.hpp"

#include <string>
#include <vector>

namespace testing_support {

using namespace sidql;

inline std::string data_path(const std::string& name) { return std::string(SIDQL_TEST_DATA) + "/" + name; }

/// Smooth random angle channels with consistent rates.
inline SphericalSequence random_spherical(std::size_t n, std::size_t m, Rng& rng) {
  SphericalSequence s;
  s.source_id = "rand";
  s.dt = 1.0 / 30.0;
  for (std::size_t j = 0; j < m; ++j) {
    s.joint_names.push_back("j" + std::to_string(j));
    s.parents.push_back(static_cast<int>(j) - 1);
    s.bone_lengths.push_back(1.0 + j);
  }
  s.theta.resize(n * m);
  s.phi.resize(n * m);
  s.theta_dot.resize(n * m);
  s.phi_dot.resize(n * m);
  for (std::size_t j = 0; j < m; ++j) {
    double a[4], f[4], p[4];
    for (int k = 0; k < 4; ++k) a[k] = uniform(rng, 0.05, 0.6), f[k] = uniform(rng, 0.2, 3.0), p[k] = uniform(rng, 0, kTwoPi);
    const double th0 = uniform(rng, 1.0, 2.1), ph0 = uniform(rng, -3.0, 3.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = s.time(i);
      const std::size_t k = s.at(i, j);
      s.theta[k] = th0 + a[0] * std::sin(kTwoPi * f[0] * t + p[0]) + a[1] * std::sin(kTwoPi * f[1] * t + p[1]);
      s.theta_dot[k] = a[0] * kTwoPi * f[0] * std::cos(kTwoPi * f[0] * t + p[0]) + a[1] * kTwoPi * f[1] * std::cos(kTwoPi * f[1] * t + p[1]);
      s.phi[k] = ph0 + a[2] * std::sin(kTwoPi * f[2] * t + p[2]) + 2.0 * a[3] * std::sin(kTwoPi * f[3] * t + p[3]);
      s.phi_dot[k] = a[2] * kTwoPi * f[2] * std::cos(kTwoPi * f[2] * t + p[2]) + 2.0 * a[3] * kTwoPi * f[3] * std::cos(kTwoPi * f[3] * t + p[3]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.root_positions.emplace_back(std::sin(0.3 * i), 0.1 * i, 0.0);
    s.root_velocities.emplace_back(0.3 * std::cos(0.3 * i) / s.dt, 0.1 / s.dt, 0.0);
  }
  return s;
}

inline oracle::Channels to_oracle(const SphericalSequence& s) {
  oracle::Channels c;
  c.dt = s.dt;
  c.t0 = s.start_time;
  for (std::size_t n = 0; n < s.frames(); ++n) {
    std::vector<double> th, ph, td, pd;
    for (std::size_t m = 0; m < s.joints(); ++m) {
      th.push_back(s.theta[s.at(n, m)]);
      ph.push_back(s.phi[s.at(n, m)]);
      td.push_back(s.theta_dot[s.at(n, m)]);
      pd.push_back(s.phi_dot[s.at(n, m)]);
    }
    c.theta.push_back(th);
    c.phi.push_back(ph);
    c.theta_dot.push_back(td);
    c.phi_dot.push_back(pd);
  }
  return c;
}

/// One joint whose polar angle is one quadratic up to frame j and another
/// after it, joined with matching value and slope; only the curvature jumps
/// at j. The azimuth is constant. Keying j reproduces the sequence exactly.
inline SphericalSequence kinked(std::size_t n, std::size_t j) {
  SphericalSequence s;
  s.source_id = "kink";
  s.dt = 1.0 / 30.0;
  s.joint_names = {"a"};
  s.parents = {-1};
  s.bone_lengths = {1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double u = s.time(i) - s.time(j);
    const double c = i <= j ? 2.0 : -2.0;
    s.theta.push_back(1.0 + u + c * u * u);
    s.theta_dot.push_back(1.0 + 2.0 * c * u);
    s.phi.push_back(0.5);
    s.phi_dot.push_back(0.0);
    s.root_positions.push_back(Vec3::Zero());
    s.root_velocities.push_back(Vec3::Zero());
  }
  return s;
}

/// Windows of the procedural corpus, converted to angle channels.
inline std::vector<SphericalSequence> synthetic_windows(std::size_t subjects, std::size_t trials, std::uint64_t seed) {
  const Skeleton sk = parse_asf(cmu_style_asf());
  std::vector<SphericalSequence> out;
  PreprocessConfig cfg;
  for (const auto& clip : synth_corpus(sk, subjects, trials, seed)) {
    const MotionSequence seq = forward_kinematics(sk, clip.motion, 1.0 / 120.0, clip.name);
    for (auto& w : preprocess(seq, cfg)) {
      out.push_back(sequence_to_spherical(w.motion));
      out.back().source_id = clip.name + "@" + std::to_string(w.start_frame);
    }
  }
  return out;
}

}  // namespace testing_support

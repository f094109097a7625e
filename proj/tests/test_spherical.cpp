#include "support.hpp"

#include <gtest/gtest.h>

using namespace sidql;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::Io;
}

}  // namespace

TEST(CartToSph, AxisPoints) {
  auto s = cart_to_sph({1, 0, 0});
  EXPECT_DOUBLE_EQ(s.r, 1.0);
  EXPECT_NEAR(s.theta, kPi / 2, 1e-15);
  EXPECT_EQ(s.phi, 0.0);
  s = cart_to_sph({0, 2, 0});
  EXPECT_DOUBLE_EQ(s.r, 2.0);
  EXPECT_NEAR(s.phi, kPi / 2, 1e-15);
  s = cart_to_sph({0, 0, -3});
  EXPECT_NEAR(s.theta, kPi, 1e-15);
  s = cart_to_sph({-1, 0, 0});
  EXPECT_NEAR(s.phi, kPi, 1e-15);
  s = cart_to_sph({-1, -0.0, 0});
  EXPECT_NEAR(s.phi, kPi, 1e-15);
}

TEST(CartToSph, ZeroVector) { EXPECT_EQ(code_of([] { cart_to_sph(Vec3::Zero()); }), Errc::ZeroVector); }

TEST(CartToSph, RoundTrip) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5));
    const auto s = cart_to_sph(p);
    EXPECT_GE(s.theta, 0.0);
    EXPECT_LE(s.theta, kPi);
    EXPECT_GT(s.phi, -kPi);
    EXPECT_LE(s.phi, kPi);
    EXPECT_LT((sph_to_cart(s) - p).norm(), 1e-12 * std::max(1.0, p.norm()));
  }
}

TEST(VelocityToSph, HandComputedEquator) {
  // at (1,0,0): e_r = x, e_theta = -z, e_phi = y
  const auto r = velocity_to_sph({1, 0, 0}, {0.5, 2.0, 3.0});
  EXPECT_NEAR(r.r_dot, 0.5, 1e-15);
  EXPECT_NEAR(r.theta_dot, -3.0, 1e-15);
  EXPECT_NEAR(r.phi_dot, 2.0, 1e-15);
}

TEST(VelocityToSph, MatchesFiniteDifference) {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
    const Vec3 v(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    if (p.norm() < 0.3 || std::hypot(p.x(), p.y()) < 0.3) continue;
    const double h = 1e-6;
    const auto a = cart_to_sph(p - h * v), b = cart_to_sph(p + h * v);
    const auto rate = velocity_to_sph(p, v);
    EXPECT_NEAR(rate.r_dot, (b.r - a.r) / (2 * h), 1e-6);
    EXPECT_NEAR(rate.theta_dot, (b.theta - a.theta) / (2 * h), 1e-6);
    EXPECT_NEAR(rate.phi_dot, wrap_angle(b.phi - a.phi) / (2 * h), 1e-6);
  }
}

TEST(VelocityToSph, Pole) {
  EXPECT_EQ(code_of([] { velocity_to_sph({0, 0, 1}, {1, 0, 0}); }), Errc::PoleSingularity);
  const auto r = velocity_to_sph({0, 0, 1}, {1, 0, 0}, SingularityPolicy::Fallback);
  EXPECT_EQ(r.phi_dot, 0.0);
  EXPECT_NEAR(r.theta_dot, 1.0, 1e-15);
}

TEST(VelocityToSphConstrained, AgreesWithGeneralForTangentialMotion) {
  Rng rng(4);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const Vec3 p(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
    Vec3 v(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    v -= v.dot(p) / p.squaredNorm() * p;
    const auto s = cart_to_sph(p);
    if (std::abs(std::sin(s.theta)) < 0.2 || std::abs(std::cos(s.phi)) < 0.2) continue;
    const auto [td, pd] = velocity_to_sph_constrained(p, v);
    const auto g = velocity_to_sph(p, v);
    EXPECT_NEAR(td, g.theta_dot, 1e-9);
    EXPECT_NEAR(pd, g.phi_dot, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(VelocityToSphConstrained, Singularities) {
  EXPECT_EQ(code_of([] { velocity_to_sph_constrained({0, 0, 1}, {1, 0, 0}); }), Errc::PoleSingularity);
  EXPECT_EQ(code_of([] { velocity_to_sph_constrained({0, 1, 0}, {1, 0, 0}); }), Errc::MeridianSingularity);
}

namespace {

MotionSequence spinning_bone(std::size_t frames, double omega) {
  MotionSequence s;
  s.dt = 1.0 / 30.0;
  s.joint_names = {"a"};
  s.parents = {-1};
  s.bone_lengths = {2.0};
  for (std::size_t n = 0; n < frames; ++n) {
    const double t = n * s.dt;
    s.root_positions.emplace_back(0.1 * t, 0, 0);
    s.root_velocities.emplace_back(0.1, 0, 0);
    s.positions.push_back(s.root_positions.back() + sph_to_cart(2.0, kPi / 3, omega * t));
    s.velocities.push_back(s.root_velocities.back() + 2.0 * std::sin(kPi / 3) * omega * Vec3(-std::sin(omega * t), std::cos(omega * t), 0));
  }
  return s;
}

}  // namespace

TEST(SequenceToSpherical, AzimuthIsUnwrapped) {
  const auto sph = sequence_to_spherical(spinning_bone(60, 9.0));
  for (std::size_t n = 0; n < 60; ++n) {
    EXPECT_NEAR(sph.theta[n], kPi / 3, 1e-12);
    EXPECT_NEAR(sph.phi[n], 9.0 * n / 30.0, 1e-9);
    EXPECT_NEAR(sph.phi_dot[n], 9.0, 1e-9);
    EXPECT_NEAR(sph.theta_dot[n], 0.0, 1e-9);
  }
  EXPECT_GT(sph.phi.back(), kTwoPi);
  EXPECT_EQ(sph.singular_samples, 0u);
}

TEST(SequenceToSpherical, RoundTripThroughCartesian) {
  const auto seq = spinning_bone(60, 2.5);
  const auto back = spherical_to_cartesian(sequence_to_spherical(seq));
  for (std::size_t i = 0; i < seq.positions.size(); ++i) {
    EXPECT_LT((back.positions[i] - seq.positions[i]).norm(), 1e-12);
    EXPECT_LT((back.velocities[i] - seq.velocities[i]).norm(), 1e-9);
  }
}

TEST(SequenceToSpherical, PoleFallbackAndError) {
  auto seq = spinning_bone(10, 1.0);
  seq.positions[4] = seq.root_positions[4] + Vec3(0, 0, 2);
  const auto sph = sequence_to_spherical(seq);
  EXPECT_EQ(sph.singular_samples, 1u);
  EXPECT_EQ(sph.phi[4], sph.phi[3]);
  EXPECT_EQ(sph.phi_dot[4], 0.0);
  SphericalOptions strict;
  strict.policy = SingularityPolicy::Error;
  EXPECT_EQ(code_of([&] { sequence_to_spherical(seq, strict); }), Errc::PoleSingularity);
}

TEST(SequenceToSpherical, ShapeChecks) {
  auto seq = spinning_bone(10, 1.0);
  seq.velocities.pop_back();
  EXPECT_EQ(code_of([&] { sequence_to_spherical(seq); }), Errc::ShapeMismatch);
  const Skeleton sk = parse_asf(cmu_style_asf());
  EXPECT_EQ(code_of([&] { sequence_to_spherical(spinning_bone(10, 1.0), sk); }), Errc::ShapeMismatch);
}

TEST(SequenceToSpherical, SyntheticCorpusHasNoSingularSamples) {
  for (const auto& s : testing_support::synthetic_windows(2, 2, 1)) {
    EXPECT_EQ(s.singular_samples, 0u) << s.source_id;
    EXPECT_EQ(s.joints(), 23u);
    EXPECT_EQ(s.frames(), 60u);
  }
}

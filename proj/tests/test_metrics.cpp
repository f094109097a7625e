#include "support.hpp"

#include <gtest/gtest.h>

using namespace sidql;
using testing_support::random_spherical;
using testing_support::to_oracle;

namespace {

SphericalSequence single_joint(std::size_t n) {
  SphericalSequence s;
  s.joint_names = {"a"};
  s.parents = {-1};
  s.bone_lengths = {1.0};
  for (std::size_t i = 0; i < n; ++i) {
    s.theta.push_back(1.0);
    s.phi.push_back(0.0);
    s.theta_dot.push_back(0.0);
    s.phi_dot.push_back(0.0);
    s.root_positions.push_back(Vec3::Zero());
    s.root_velocities.push_back(Vec3::Zero());
  }
  return s;
}

std::vector<std::vector<std::size_t>> all_sets(std::size_t n, std::size_t max_w) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t bits = 0; bits < (1u << (n - 2)); ++bits) {
    std::vector<std::size_t> k{0};
    for (std::size_t i = 0; i + 2 < n; ++i)
      if (bits & (1u << i)) k.push_back(i + 1);
    k.push_back(n - 1);
    if (k.size() <= max_w) out.push_back(k);
  }
  return out;
}

}  // namespace

TEST(WrappedDistance, Values) {
  EXPECT_NEAR(wrapped_distance(3.1, -3.1), kTwoPi - 6.2, 1e-12);
  EXPECT_NEAR(wrapped_distance(3.1, -3.1), 0.0832, 1e-4);
  EXPECT_DOUBLE_EQ(wrapped_distance(0.5, 0.2), 0.3);
  EXPECT_NEAR(wrapped_distance(0.1, 0.1 + 4 * kPi), 0.0, 1e-12);
}

TEST(SectionError, IdenticalIsZero) {
  Rng rng(1);
  const auto sph = random_spherical(20, 3, rng);
  Section s = reconstruct_section(sph, 0, 19);
  for (std::size_t q = 0; q < s.length(); ++q)
    for (std::size_t m = 0; m < 3; ++m) {
      s.theta[s.at(q, m)] = sph.theta[sph.at(q, m)];
      s.phi[s.at(q, m)] = sph.phi[sph.at(q, m)];
    }
  const auto e = section_error(sph, s);
  EXPECT_EQ(e.theta, 0.0);
  EXPECT_EQ(e.phi, 0.0);
}

TEST(SectionError, HandSum) {
  const auto sph = single_joint(3);
  Section s = reconstruct_section(sph, 0, 2);
  s.theta[s.at(1, 0)] += 0.1;
  EXPECT_NEAR(section_error(sph, s).theta, 0.1, 1e-15);
  EXPECT_EQ(section_error(sph, s).phi, 0.0);
}

TEST(SectionError, AzimuthUsesWrappedDistance) {
  auto sph = single_joint(3);
  sph.phi[1] = 3.1;
  Section s = reconstruct_section(sph, 0, 2);
  s.phi[s.at(1, 0)] = -3.1;
  EXPECT_NEAR(section_error(sph, s).phi, kTwoPi - 6.2, 1e-12);
}

TEST(QError, AllFramesIsZero) {
  Rng rng(2);
  const auto sph = random_spherical(60, 23, rng);
  EXPECT_EQ(q_error(sph, KeyframeSet::all(60)), 0.0);
}

TEST(QError, CubicTruthWithKnotsAsKeys) {
  // two cubic pieces joined at frame 12 with matching value and slope data
  auto sph = single_joint(30);
  auto piece = [](double t, bool left, double* d) {
    if (left) {
      *d = 1 - 0.6 * t + 3 * t * t;
      return 1 + t - 0.3 * t * t + t * t * t;
    }
    *d = -2 + 0.8 * t;
    return 0.9 - 2 * t + 0.4 * t * t;
  };
  for (std::size_t i = 0; i < 30; ++i) {
    double d;
    sph.theta[i] = piece(sph.time(i), i < 12, &d);
    sph.theta_dot[i] = d;
    sph.phi[i] = piece(sph.time(i), i >= 12, &d);
    sph.phi_dot[i] = d;
  }
  EXPECT_LT(q_error(sph, KeyframeSet(30, {0, 11, 12, 29})), 1e-9);
  EXPECT_GT(q_error(sph, KeyframeSet(30, {0, 29})), 1e-3);
}

TEST(QError, EightFramesAgainstOracle) {
  Rng rng(3);
  const auto sph = random_spherical(8, 2, rng);
  const auto ch = to_oracle(sph);
  EXPECT_NEAR(q_error(sph, KeyframeSet(8, {0, 7})), oracle::q_error(ch, {0, 7}), 1e-9);
  EXPECT_NEAR(q_error(sph, KeyframeSet(8, {0, 3, 7})), oracle::q_error(ch, {0, 3, 7}), 1e-9);
  EXPECT_LT(q_error(sph, KeyframeSet(8, {0, 3, 7})), q_error(sph, KeyframeSet(8, {0, 7})) + 1e-12);
}

TEST(QError, ExhaustiveOracleEquivalence) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + rng() % 8, m = 1 + rng() % 3;
    const auto sph = random_spherical(n, m, rng);
    const auto ch = to_oracle(sph);
    for (const auto& k : all_sets(n, 4)) EXPECT_NEAR(q_error(sph, KeyframeSet(n, k)), oracle::q_error(ch, k), 1e-9);
  }
}

TEST(QError, SizeMismatch) {
  Rng rng(4);
  const auto sph = random_spherical(10, 1, rng);
  EXPECT_THROW(q_error(sph, KeyframeSet::endpoints(9)), Error);
}

TEST(QError, TimeShiftInvariance) {
  Rng rng(5);
  auto sph = random_spherical(40, 3, rng);
  const KeyframeSet k(40, {0, 9, 22, 39});
  const double q = q_error(sph, k);
  sph.start_time = 123.456;
  EXPECT_NEAR(q_error(sph, k), q, 1e-9);
}

TEST(QError, ReversalSymmetry) {
  Rng rng(6);
  const auto sph = random_spherical(40, 3, rng);
  SphericalSequence rev = sph;
  const std::size_t n = 40, m = 3;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const auto a = rev.at(i, j), b = sph.at(n - 1 - i, j);
      rev.theta[a] = sph.theta[b];
      rev.phi[a] = sph.phi[b];
      rev.theta_dot[a] = -sph.theta_dot[b];
      rev.phi_dot[a] = -sph.phi_dot[b];
    }
  EXPECT_NEAR(q_error(sph, KeyframeSet(n, {0, 9, 22, 39})), q_error(rev, KeyframeSet(n, {0, 17, 30, 39})), 1e-9);
}

TEST(EvaluateReport, MeanIsSectionSum) {
  Rng rng(7);
  const auto sph = random_spherical(60, 5, rng);
  const KeyframeSet k(60, {0, 14, 33, 59});
  const auto r = evaluate(sph, k);
  ASSERT_EQ(r.sections.size(), 3u);
  double sum = 0;
  for (const auto& s : r.sections) sum += s.total();
  EXPECT_NEAR(r.mean, sum / 300.0, 1e-12);
  EXPECT_NEAR(r.mean, q_error(sph, k), 1e-12);
  EXPECT_GE(r.root_rmse, 0.0);
}

TEST(RelativeError, EndpointsAndAllFrames) {
  Rng rng(8);
  const auto sph = random_spherical(20, 2, rng);
  EXPECT_EQ(normalized_relative_error(sph, KeyframeSet::endpoints(20)), 0.0);
  EXPECT_EQ(normalized_relative_error(sph, KeyframeSet::all(20)), 1.0);
}

TEST(RelativeError, StaticSequenceIsDegenerate) {
  try {
    normalized_relative_error(single_joint(10), KeyframeSet::all(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateSequence);
  }
}

TEST(StepReward, Cases) {
  Rng rng(9);
  const auto sph = random_spherical(8, 2, rng);
  const auto ch = to_oracle(sph);
  const double q07 = oracle::q_error(ch, {0, 7}), q037 = oracle::q_error(ch, {0, 3, 7});
  EXPECT_NEAR(step_reward(sph, KeyframeSet(8, {0, 7}), KeyframeSet(8, {0, 3, 7})), (q07 - q037) / q07, 1e-9);

  // last missing frame zeroes Q
  std::vector<std::size_t> most{0, 1, 2, 4, 5, 6, 7};
  const KeyframeSet before(8, most);
  EXPECT_NEAR(step_reward(sph, before, KeyframeSet::all(8)), q_error(sph, before) / q07, 1e-12);

  EXPECT_THROW(step_reward(sph, KeyframeSet(8, {0, 7}), KeyframeSet(8, {0, 2, 3, 7})), Error);
  EXPECT_THROW(step_reward(sph, KeyframeSet(8, {0, 2, 7}), KeyframeSet(8, {0, 3, 5, 7})), Error);
}

TEST(StepReward, UnchangedQGivesZero) {
  // linear theta with exact rates: any section is reproduced, so Q stays put
  auto sph = single_joint(10);
  for (std::size_t i = 0; i < 10; ++i) sph.theta[i] = 1.0 + sph.time(i), sph.theta_dot[i] = 1.0;
  sph.phi[9] = 0.3;  // only the last section is wrong
  EXPECT_NEAR(step_reward(sph, KeyframeSet(10, {0, 8, 9}), KeyframeSet(10, {0, 4, 8, 9})), 0.0, 1e-15);
}

TEST(EpisodeScorer, Telescopes) {
  Rng rng(10);
  const auto sph = random_spherical(60, 4, rng);
  EpisodeScorer sc(sph);
  double sum = 0;
  for (std::size_t f : {30u, 11u, 47u, 5u}) sum += sc.add(f);
  EXPECT_NEAR(sum, 1.0 - sc.q() / sc.q0(), 1e-12);
  EXPECT_NEAR(sc.relative_error(), normalized_relative_error(sph, sc.keys()), 1e-12);
}

TEST(MeanAngleError, Cases) {
  Rng rng(11);
  std::vector<SphericalSequence> set{random_spherical(30, 2, rng)};
  const auto one = test_mean_angle_error(set, [](const SphericalSequence& s) { return KeyframeSet(s.frames(), {0, 10, 29}); });
  EXPECT_DOUBLE_EQ(one.mean, q_error(set[0], KeyframeSet(30, {0, 10, 29})));

  set.push_back(single_joint(30));
  set.push_back(random_spherical(30, 2, rng));
  const auto all = test_mean_angle_error(set, [](const SphericalSequence& s) { return KeyframeSet::all(s.frames()); });
  EXPECT_EQ(all.mean, 0.0);
  EXPECT_EQ(all.degenerate, 1u);
  ASSERT_EQ(all.per_sequence.size(), 3u);
  EXPECT_FALSE(all.per_sequence[1].has_value());

  EXPECT_THROW(test_mean_angle_error(std::vector<SphericalSequence>{}, Selector{}), Error);
}

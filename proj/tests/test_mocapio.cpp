#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sidql;
using testing_support::data_path;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::Io;
}

Skeleton chain() { return parse_asf(slurp(data_path("chain.asf"))); }

}  // namespace

TEST(ParseAsf, ChainFixture) {
  const Skeleton sk = chain();
  ASSERT_EQ(sk.size(), 3u);
  EXPECT_EQ(sk.joints[0].name, "root");
  EXPECT_EQ(sk.bone_lengths(), (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(sk.joints[2].parent, 1);
  EXPECT_EQ(sk.joints[1].dof.size(), 3u);
  EXPECT_NEAR(sk.joints[1].limits[0].second, kPi, 1e-12);
}

TEST(ParseAsf, DanglingReference) {
  try {
    parse_asf(slurp(data_path("dangling.asf")));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedAsf);
    EXPECT_NE(std::string(e.what()).find("line 38"), std::string::npos) << e.what();
  }
}

TEST(ParseAsf, UnknownDofToken) {
  try {
    parse_asf(slurp(data_path("baddof.asf")));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedAsf);
    EXPECT_NE(std::string(e.what()).find("line 33"), std::string::npos) << e.what();
  }
}

TEST(ParseAsf, MissingSection) {
  std::string text = slurp(data_path("chain.asf"));
  text = text.substr(0, text.find(":hierarchy"));
  EXPECT_EQ(code_of([&] { parse_asf(text); }), Errc::MalformedAsf);
}

TEST(ParseAsf, LengthScaleAndNormalisation) {
  std::string text = slurp(data_path("chain.asf"));
  text.replace(text.find("length 1.0"), 10, "length 0.5");
  text.replace(text.find("direction 0 0 1"), 15, "direction 0 0 4");
  const Skeleton sk = parse_asf(text);
  EXPECT_DOUBLE_EQ(sk.joints[1].length, 1.0);
  EXPECT_DOUBLE_EQ(sk.joints[2].length, 1.5);
  EXPECT_NEAR(sk.joints[1].direction.norm(), 1.0, 1e-12);
}

TEST(ParseAsf, CmuStyleSkeletonHas23DrivenJoints) {
  const Skeleton sk = parse_asf(slurp(data_path("cmu_style.asf")));
  EXPECT_EQ(sk.size(), 31u);
  const auto leaves = sk.leaf_names();
  EXPECT_EQ(leaves.size(), 7u);
  const auto excl = cmu_default_exclusions();
  std::size_t kept = 0;
  for (std::size_t j = 1; j < sk.size(); ++j)
    if (std::find(excl.begin(), excl.end(), sk.joints[j].name) == excl.end()) ++kept;
  EXPECT_EQ(kept, 23u);
  for (const auto& l : leaves) EXPECT_NE(std::find(excl.begin(), excl.end(), l), excl.end()) << l;
}

TEST(ParseAsf, WriteParseRoundTrip) {
  const Skeleton sk = parse_asf(slurp(data_path("cmu_style.asf")));
  const Skeleton again = parse_asf(write_asf(sk));
  ASSERT_EQ(again.size(), sk.size());
  for (std::size_t j = 0; j < sk.size(); ++j) {
    EXPECT_EQ(again.joints[j].name, sk.joints[j].name);
    EXPECT_EQ(again.joints[j].parent, sk.joints[j].parent);
    EXPECT_NEAR(again.joints[j].length, sk.joints[j].length, 1e-9);
    EXPECT_LT((again.joints[j].direction - sk.joints[j].direction).norm(), 1e-9);
    EXPECT_LT((again.joints[j].axis - sk.joints[j].axis).norm(), 1e-9);
  }
}

TEST(ParseAmc, ZeroFrames) {
  const Skeleton sk = chain();
  const RawMotion m = parse_amc(slurp(data_path("chain_zero.amc")), sk);
  ASSERT_EQ(m.frames.size(), 4u);
  for (const auto& f : m.frames)
    for (const auto& ch : f.channels)
      for (double v : ch) EXPECT_EQ(v, 0.0);
}

TEST(ParseAmc, GapIsMalformed) {
  const Skeleton sk = chain();
  EXPECT_EQ(code_of([&] { parse_amc(slurp(data_path("chain_gap.amc")), sk); }), Errc::MalformedAmc);
}

TEST(ParseAmc, ChannelCountMismatch) {
  const Skeleton sk = chain();
  EXPECT_EQ(code_of([&] { parse_amc(slurp(data_path("chain_badcount.amc")), sk); }), Errc::MalformedAmc);
}

TEST(ParseAmc, DegreesConverted) {
  const Skeleton sk = chain();
  const RawMotion m = parse_amc(slurp(data_path("chain_rot90.amc")), sk);
  EXPECT_NEAR(m.frames[0].channels[0][3], kPi / 2, 1e-15);
}

TEST(ForwardKinematics, RestChain) {
  const Skeleton sk = chain();
  const MotionSequence s = forward_kinematics(sk, parse_amc(slurp(data_path("chain_zero.amc")), sk));
  EXPECT_LT((s.position(0, 0) - Vec3(0, 0, 2)).norm(), 1e-15);
  EXPECT_LT((s.position(0, 1) - Vec3(0, 3, 2)).norm(), 1e-15);
}

TEST(ForwardKinematics, RootQuarterTurnAboutX) {
  const Skeleton sk = chain();
  const MotionSequence s = forward_kinematics(sk, parse_amc(slurp(data_path("chain_rot90.amc")), sk));
  // hand-computed Rx(90 deg) = [[1,0,0],[0,0,-1],[0,1,0]] applied to (0,0,2)
  EXPECT_LT((s.position(0, 0) - Vec3(0, -2, 0)).norm(), 1e-12);
  EXPECT_LT((s.position(0, 1) - Vec3(0, -2, 3)).norm(), 1e-12);
}

TEST(ForwardKinematics, BoneLengthsPreserved) {
  const Skeleton sk = parse_asf(cmu_style_asf());
  const RawMotion raw = synth_clip(sk, ClipKind::Run, 240, 5);
  const MotionSequence s = forward_kinematics(sk, raw);
  EXPECT_LE(s.max_length_deviation(), 1e-6);
}

TEST(ExportAmc, RoundTripWithinTolerance) {
  const Skeleton sk = parse_asf(cmu_style_asf());
  const MotionSequence src = forward_kinematics(sk, synth_clip(sk, ClipKind::Walk, 480, 11), 1.0 / 120.0, "w");
  const auto windows = preprocess(src, PreprocessConfig{});
  const MotionSequence& win = windows.front().motion;
  const MotionSequence back = forward_kinematics(sk, parse_amc(export_amc(sk, win), sk));
  ASSERT_EQ(back.frames(), win.frames());
  double worst = 0;
  for (std::size_t n = 0; n < win.frames(); ++n)
    for (std::size_t m = 0; m < win.joints(); ++m) {
      const int j = back.index_of(win.joint_names[m]);
      ASSERT_GE(j, 0);
      worst = std::max(worst, (back.position(n, static_cast<std::size_t>(j)) - win.position(n, m)).norm());
    }
  EXPECT_LT(worst, 1e-4);
}

TEST(ExportAmc, ZeroMotionGivesConstantFrames) {
  const Skeleton sk = chain();
  const MotionSequence s = forward_kinematics(sk, parse_amc(slurp(data_path("chain_zero.amc")), sk));
  const RawMotion raw = parse_amc(export_amc(sk, s), sk);
  for (const auto& f : raw.frames)
    for (const auto& ch : f.channels)
      for (double v : ch) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(ExportAmc, StretchedBoneIsUnreachable) {
  const Skeleton sk = chain();
  MotionSequence s = forward_kinematics(sk, parse_amc(slurp(data_path("chain_zero.amc")), sk));
  // b sits 5 from a but its bone is 3 long
  s.position(2, 1) = s.position(2, 0) + Vec3(0, 5, 0);
  try {
    export_amc(sk, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnreachablePose);
    EXPECT_NE(std::string(e.what()).find("frame 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos) << e.what();
  }
  SolveReport rep;
  EXPECT_NO_THROW(export_amc_best_fit(sk, s, &rep));
  EXPECT_GT(rep.max_error, 1.0);
  EXPECT_EQ(rep.worst_frame, 2u);
}

namespace {

MotionSequence linear_track(std::size_t frames) {
  MotionSequence s;
  s.source_id = "lin";
  s.dt = 1.0 / 120.0;
  s.joint_names = {"a", "b"};
  s.parents = {-1, 0};
  s.bone_lengths = {1.0, 1.0};
  for (std::size_t n = 0; n < frames; ++n) {
    const double t = static_cast<double>(n) / 120.0;
    s.root_positions.emplace_back(t, 0, 0);
    s.root_velocities.emplace_back(0, 0, 0);
    s.positions.emplace_back(t, 1, 0);
    s.positions.emplace_back(t, 1, 1);
    s.velocities.assign(s.positions.size(), Vec3::Zero());
  }
  return s;
}

PreprocessConfig keep_all() {
  PreprocessConfig c;
  c.joint_exclusions.clear();
  return c;
}

}  // namespace

TEST(Preprocess, OneWindowFrom240Frames) {
  const auto w = preprocess(linear_track(240), keep_all());
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].motion.frames(), 60u);
  EXPECT_DOUBLE_EQ(w[0].motion.dt, 4.0 * (1.0 / 120.0));
  EXPECT_NEAR(w[0].motion.dt, 1.0 / 30.0, 1e-15);
}

TEST(Preprocess, TooShort) {
  EXPECT_EQ(code_of([] { preprocess(linear_track(239), keep_all()); }), Errc::TooShort);
}

TEST(Preprocess, LinearMotionHasExactVelocity) {
  const auto w = preprocess(linear_track(480), keep_all());
  ASSERT_EQ(w.size(), 2u);
  for (const auto& win : w)
    for (std::size_t n = 0; n < win.motion.frames(); ++n) {
      EXPECT_LT((win.motion.velocity(n, 0) - Vec3(1, 0, 0)).norm(), 1e-12);
      EXPECT_LT((win.motion.root_velocities[n] - Vec3(1, 0, 0)).norm(), 1e-12);
    }
  EXPECT_EQ(w[1].start_frame, 240u);
}

TEST(Preprocess, NonIntegerRatioRejected) {
  PreprocessConfig c = keep_all();
  c.target_fps = 50;
  EXPECT_EQ(code_of([&] { preprocess(linear_track(480), c); }), Errc::InvalidArgument);
}

TEST(Preprocess, ExclusionKeeps23CmuJoints) {
  const Skeleton sk = parse_asf(cmu_style_asf());
  const MotionSequence s = forward_kinematics(sk, synth_clip(sk, ClipKind::Wave, 240, 2));
  const auto w = preprocess(s, PreprocessConfig{});
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].motion.joints(), 23u);
  for (std::size_t m = 0; m < 23; ++m) {
    const int p = w[0].motion.parents[m];
    if (p >= 0) {
      EXPECT_LT(p, static_cast<int>(m));
    }
  }
  EXPECT_LE(w[0].motion.max_length_deviation(), 1e-6);
}

TEST(Preprocess, ExcludingAParentOfAKeptJointFails) {
  const auto s = linear_track(240);
  PreprocessConfig c;
  c.joint_exclusions = {"a"};
  EXPECT_EQ(code_of([&] { preprocess(s, c); }), Errc::InvalidArgument);
}

TEST(Preprocess, DownsamplingScalesTimeStepExactly) {
  const auto s = linear_track(100);
  for (std::size_t k : {1u, 2u, 3u, 4u, 7u}) EXPECT_EQ(downsample(s, k).dt, static_cast<double>(k) * s.dt);
}

TEST(Dataset, WindowRecordRoundTrip) {
  const Skeleton sk = parse_asf(cmu_style_asf());
  const auto w = preprocess(forward_kinematics(sk, synth_clip(sk, ClipKind::Jump, 240, 3), 1.0 / 120, "j"), PreprocessConfig{});
  std::stringstream buf;
  write_window(buf, w[0].motion);
  const MotionSequence back = read_window(buf);
  EXPECT_EQ(back.joint_names, w[0].motion.joint_names);
  EXPECT_EQ(back.parents, w[0].motion.parents);
  EXPECT_EQ(back.dt, w[0].motion.dt);
  EXPECT_EQ(back.source_id, w[0].motion.source_id);
  for (std::size_t i = 0; i < back.positions.size(); ++i) {
    ASSERT_EQ(back.positions[i], w[0].motion.positions[i]);
    ASSERT_EQ(back.velocities[i], w[0].motion.velocities[i]);
  }
}

TEST(Dataset, TruncatedWindowRecord) {
  const auto w = preprocess(linear_track(240), keep_all());
  std::stringstream buf;
  write_window(buf, w[0].motion);
  std::string text = buf.str();
  text.resize(text.size() - 5);
  std::stringstream cut(text);
  EXPECT_EQ(code_of([&] { read_window(cut); }), Errc::Io);
}

TEST(Dataset, SplitIsSourceLevelAndReproducible) {
  std::vector<std::string> sources;
  for (int i = 0; i < 20; ++i) sources.push_back("s" + std::to_string(i));
  const auto a = assign_split(sources, 7), b = assign_split(sources, 7), c = assign_split(sources, 8);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  std::size_t train = 0;
  for (const auto& [s, tag] : a) train += tag == "train";
  EXPECT_EQ(train, 16u);
  const auto two = assign_split({"x", "y"}, 1);
  EXPECT_NE(two.at("x"), two.at("y"));
}

TEST(Dataset, ManifestJsonRoundTrip) {
  DatasetManifest m;
  m.preprocessing.seed = 5;
  m.windows.push_back({"a@0", "a", "a.asf", 0, 60, "train", "windows/a@0.win"});
  const DatasetManifest back = DatasetManifest::from_json(m.to_json());
  EXPECT_EQ(back.hash(), m.hash());
  EXPECT_EQ(back.windows[0].file, "windows/a@0.win");
  EXPECT_EQ(back.preprocessing.joint_exclusions, cmu_default_exclusions());
}

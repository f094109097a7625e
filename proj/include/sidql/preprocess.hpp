#pragma once

#include "sidql/error.hpp"
#include "sidql/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace sidql {

/// The leaf bones of the CMU skeleton: finger, thumb and toe tips plus the
/// head tip. Dropping them leaves the 23 driven joints used for training.
inline std::vector<std::string> cmu_default_exclusions() {
  return {"lfingers", "lthumb", "rfingers", "rthumb", "ltoes", "rtoes", "head"};
}

struct PreprocessConfig {
  double source_fps = 120.0;
  double target_fps = 30.0;
  std::size_t window_len = 60;
  std::vector<std::string> joint_exclusions = cmu_default_exclusions();
  std::uint64_t seed = 0;
};

/// A fixed-length slice of a source sequence.
struct Window {
  std::string source;
  std::size_t start_frame = 0;  // in source (pre-downsampling) frames
  MotionSequence motion;
};

/// Keeps every `step`-th frame; the new time step is exactly step * dt.
inline MotionSequence downsample(const MotionSequence& seq, std::size_t step) {
  if (step == 0) throw Error(Errc::InvalidArgument, "downsampling step must be positive");
  MotionSequence out = seq;
  const std::size_t m = seq.joints();
  const std::size_t kept = seq.frames() / step;
  out.dt = static_cast<double>(step) * seq.dt;
  out.positions.clear();
  out.velocities.clear();
  out.root_positions.clear();
  out.root_velocities.clear();
  for (std::size_t i = 0; i < kept; ++i) {
    const std::size_t n = i * step;
    out.root_positions.push_back(seq.root_positions[n]);
    out.root_velocities.push_back(seq.root_velocities[n]);
    for (std::size_t j = 0; j < m; ++j) {
      out.positions.push_back(seq.position(n, j));
      out.velocities.push_back(seq.velocity(n, j));
    }
  }
  return out;
}

/// Drops the named joints. A kept joint may not hang off a dropped one.
inline MotionSequence exclude_joints(const MotionSequence& seq, const std::vector<std::string>& exclusions) {
  const std::size_t m = seq.joints();
  std::vector<int> remap(m, -1);
  MotionSequence out = seq;
  out.joint_names.clear();
  out.parents.clear();
  out.bone_lengths.clear();
  for (std::size_t j = 0; j < m; ++j) {
    if (std::find(exclusions.begin(), exclusions.end(), seq.joint_names[j]) != exclusions.end()) continue;
    const int parent = seq.parents[j];
    if (parent >= 0 && remap[static_cast<std::size_t>(parent)] < 0)
      throw Error(Errc::InvalidArgument, "joint '" + seq.joint_names[j] + "' is kept but its parent '" +
                                             seq.joint_names[static_cast<std::size_t>(parent)] + "' is excluded");
    remap[j] = static_cast<int>(out.joint_names.size());
    out.joint_names.push_back(seq.joint_names[j]);
    out.parents.push_back(parent < 0 ? -1 : remap[static_cast<std::size_t>(parent)]);
    out.bone_lengths.push_back(seq.bone_lengths[j]);
  }
  out.positions.clear();
  out.velocities.clear();
  for (std::size_t n = 0; n < seq.frames(); ++n)
    for (std::size_t j = 0; j < m; ++j)
      if (remap[j] >= 0) {
        out.positions.push_back(seq.position(n, j));
        out.velocities.push_back(seq.velocity(n, j));
      }
  return out;
}

/// Central differences inside, first-order one-sided differences at the two
/// ends. Exact for positions that are affine in time.
inline std::vector<Vec3> finite_difference(const std::vector<Vec3>& track, double dt) {
  const std::size_t n = track.size();
  std::vector<Vec3> v(n, Vec3::Zero());
  if (n < 2) return v;
  v[0] = (track[1] - track[0]) / dt;
  v[n - 1] = (track[n - 1] - track[n - 2]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) v[i] = (track[i + 1] - track[i - 1]) / (2.0 * dt);
  return v;
}

inline void fill_velocities(MotionSequence& seq) {
  const std::size_t n = seq.frames(), m = seq.joints();
  seq.root_velocities = finite_difference(seq.root_positions, seq.dt);
  seq.velocities.assign(n * m, Vec3::Zero());
  std::vector<Vec3> track(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) track[i] = seq.position(i, j);
    const auto v = finite_difference(track, seq.dt);
    for (std::size_t i = 0; i < n; ++i) seq.velocity(i, j) = v[i];
  }
}

/// Copies frames [first, first + count) into a new sequence.
inline MotionSequence slice(const MotionSequence& seq, std::size_t first, std::size_t count) {
  MotionSequence out = seq;
  const std::size_t m = seq.joints();
  out.root_positions.assign(seq.root_positions.begin() + static_cast<std::ptrdiff_t>(first),
                            seq.root_positions.begin() + static_cast<std::ptrdiff_t>(first + count));
  out.root_velocities.assign(seq.root_velocities.begin() + static_cast<std::ptrdiff_t>(first),
                             seq.root_velocities.begin() + static_cast<std::ptrdiff_t>(first + count));
  out.positions.assign(seq.positions.begin() + static_cast<std::ptrdiff_t>(first * m),
                       seq.positions.begin() + static_cast<std::ptrdiff_t>((first + count) * m));
  out.velocities.assign(seq.velocities.begin() + static_cast<std::ptrdiff_t>(first * m),
                        seq.velocities.begin() + static_cast<std::ptrdiff_t>((first + count) * m));
  return out;
}

/// Downsample, drop excluded joints, cut into non-overlapping windows and
/// estimate velocities inside each window.
inline std::vector<Window> preprocess(const MotionSequence& seq, const PreprocessConfig& cfg) {
  if (!(cfg.target_fps > 0.0) || !(cfg.source_fps > 0.0) || cfg.window_len < 2)
    throw Error(Errc::InvalidArgument, "frame rates must be positive and windows at least two frames long");
  const double ratio = cfg.source_fps / cfg.target_fps;
  const double step_f = std::round(ratio);
  if (step_f < 1.0 || std::abs(ratio - step_f) > 1e-9)
    throw Error(Errc::InvalidArgument, "source fps must be an integer multiple of the target fps");
  const auto step = static_cast<std::size_t>(step_f);

  MotionSequence src = seq;
  src.dt = 1.0 / cfg.source_fps;
  const MotionSequence reduced = exclude_joints(downsample(src, step), cfg.joint_exclusions);
  if (reduced.frames() < cfg.window_len)
    throw Error(Errc::TooShort, "'" + seq.source_id + "' has " + std::to_string(reduced.frames()) + " frames after downsampling, need " +
                                    std::to_string(cfg.window_len));

  std::vector<Window> windows;
  for (std::size_t first = 0; first + cfg.window_len <= reduced.frames(); first += cfg.window_len) {
    Window w;
    w.source = seq.source_id;
    w.start_frame = first * step;
    w.motion = slice(reduced, first, cfg.window_len);
    w.motion.source_id = seq.source_id + "@" + std::to_string(w.start_frame);
    fill_velocities(w.motion);
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace sidql

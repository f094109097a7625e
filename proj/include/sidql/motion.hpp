#pragma once

#include "sidql/error.hpp"
#include "sidql/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace sidql {

/// World-space joint trajectories at a uniform time step.
///
/// `positions`/`velocities` are frame-major (index `n * M + m`) and hold the
/// non-root joints only; the root track lives in `root_positions` and
/// `root_velocities`. `parents[m]` indexes `joint_names`, or is -1 when the
/// joint hangs off the root.
struct MotionSequence {
  std::string source_id;
  double dt = 1.0 / 120.0;
  std::vector<std::string> joint_names;
  std::vector<int> parents;
  std::vector<double> bone_lengths;
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  std::vector<Vec3> root_positions;
  std::vector<Vec3> root_velocities;

  std::size_t frames() const { return root_positions.size(); }
  std::size_t joints() const { return joint_names.size(); }

  const Vec3& position(std::size_t n, std::size_t m) const { return positions[n * joints() + m]; }
  Vec3& position(std::size_t n, std::size_t m) { return positions[n * joints() + m]; }
  const Vec3& velocity(std::size_t n, std::size_t m) const { return velocities[n * joints() + m]; }
  Vec3& velocity(std::size_t n, std::size_t m) { return velocities[n * joints() + m]; }

  /// Position of joint m's parent (the root when parents[m] == -1).
  const Vec3& parent_position(std::size_t n, std::size_t m) const {
    return parents[m] < 0 ? root_positions[n] : position(n, static_cast<std::size_t>(parents[m]));
  }
  const Vec3& parent_velocity(std::size_t n, std::size_t m) const {
    return parents[m] < 0 ? root_velocities[n] : velocity(n, static_cast<std::size_t>(parents[m]));
  }

  int index_of(const std::string& name) const {
    for (std::size_t m = 0; m < joint_names.size(); ++m)
      if (joint_names[m] == name) return static_cast<int>(m);
    return -1;
  }

  /// Largest relative bone-length deviation over all frames and joints.
  double max_length_deviation() const {
    double worst = 0.0;
    for (std::size_t n = 0; n < frames(); ++n)
      for (std::size_t m = 0; m < joints(); ++m) {
        const double d = (position(n, m) - parent_position(n, m)).norm();
        worst = std::max(worst, std::abs(d - bone_lengths[m]) / bone_lengths[m]);
      }
    return worst;
  }

  void check_shape() const {
    const std::size_t n = frames(), m = joints();
    if (n < 2) throw Error(Errc::ShapeMismatch, "sequence needs at least two frames");
    if (!(dt > 0.0)) throw Error(Errc::ShapeMismatch, "time step must be positive");
    if (parents.size() != m || bone_lengths.size() != m || positions.size() != n * m || velocities.size() != n * m ||
        root_velocities.size() != n)
      throw Error(Errc::ShapeMismatch, "sequence arrays disagree on frame or joint count");
    for (std::size_t j = 0; j < m; ++j)
      if (parents[j] >= static_cast<int>(j)) throw Error(Errc::ShapeMismatch, "parents must precede children");
  }
};

}  // namespace sidql

#pragma once

#include "sidql/amc.hpp"
#include "sidql/error.hpp"
#include "sidql/motion.hpp"
#include "sidql/rng.hpp"
#include "sidql/skeleton.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace sidql {

/// Global bone rotations and end positions for one frame.
struct Pose {
  std::vector<Mat3> rotation;
  std::vector<Vec3> position;
};

/// Rotation built from channel values; the first listed channel is applied
/// first, so "rx ry rz" gives Rz * Ry * Rx. Translation channels are skipped.
inline Mat3 channel_rotation(const std::vector<Channel>& order, const std::vector<double>& values) {
  Mat3 r = Mat3::Identity();
  for (std::size_t k = 0; k < order.size(); ++k)
    if (is_rotation(order[k])) r = axis_rotation(channel_axis(order[k]), values[k]) * r;
  return r;
}

/// Forward kinematics with the per-bone axis frames cached.
///
/// Each bone composes as G = G_parent * C * M * C^-1, where C comes from the
/// ASF `axis` line and M from the AMC channels, and its end point sits at
/// parent_end + length * G * direction.
class Kinematics {
 public:
  explicit Kinematics(const Skeleton& sk) : sk_(&sk) {
    axes_.reserve(sk.size());
    axes_.push_back(euler_rotation(sk.root_axis_order, sk.root_orientation));
    for (std::size_t j = 1; j < sk.size(); ++j) axes_.push_back(euler_rotation(sk.joints[j].axis_order, sk.joints[j].axis));
  }

  const Skeleton& skeleton() const { return *sk_; }

  Pose pose(const RawFrame& frame) const {
    const Skeleton& sk = *sk_;
    Pose p;
    p.rotation.resize(sk.size());
    p.position.resize(sk.size());
    Vec3 t = Vec3::Zero();
    for (std::size_t k = 0; k < sk.root_order.size(); ++k)
      if (!is_rotation(sk.root_order[k])) t[channel_axis(sk.root_order[k])] = frame.channels[0][k];
    p.rotation[0] = axes_[0] * channel_rotation(sk.root_order, frame.channels[0]) * axes_[0].transpose();
    p.position[0] = t;
    for (std::size_t j = 1; j < sk.size(); ++j) {
      const Joint& joint = sk.joints[j];
      const auto parent = static_cast<std::size_t>(joint.parent);
      p.rotation[j] = p.rotation[parent] * axes_[j] * channel_rotation(joint.dof, frame.channels[j]) * axes_[j].transpose();
      p.position[j] = p.position[parent] + joint.length * (p.rotation[j] * joint.direction);
    }
    return p;
  }

 private:
  const Skeleton* sk_;
  std::vector<Mat3> axes_;
};

/// World-space positions for every AMC frame. Velocities are left at zero;
/// preprocessing fills them in after resampling.
inline MotionSequence forward_kinematics(const Skeleton& sk, const RawMotion& motion, double dt = 1.0 / 120.0,
                                         std::string source_id = {}) {
  MotionSequence seq;
  seq.source_id = std::move(source_id);
  seq.dt = dt;
  const std::size_t m = sk.size() - 1;
  for (std::size_t j = 1; j < sk.size(); ++j) {
    seq.joint_names.push_back(sk.joints[j].name);
    seq.parents.push_back(sk.joints[j].parent - 1);
    seq.bone_lengths.push_back(sk.joints[j].length);
  }
  const Kinematics kin(sk);
  const std::size_t n = motion.frames.size();
  seq.positions.reserve(n * m);
  for (const auto& frame : motion.frames) {
    const Pose p = kin.pose(frame);
    seq.root_positions.push_back(p.position[0]);
    for (std::size_t j = 1; j < sk.size(); ++j) seq.positions.push_back(p.position[j]);
  }
  seq.velocities.assign(n * m, Vec3::Zero());
  seq.root_velocities.assign(n, Vec3::Zero());
  return seq;
}

/// Recovers AMC channel values from joint positions by damped least squares
/// over the whole skeleton. Joints absent from the target set keep zero
/// channels; root translation is taken directly from the root track.
class PoseSolver {
 public:
  static constexpr double kReachTolerance = 1e-5;

  PoseSolver(const Skeleton& sk, std::vector<int> target_joints)
      : sk_(&sk), kin_(sk), targets_(std::move(target_joints)) {
    for (std::size_t j = 0; j < sk.size(); ++j) {
      const auto& order = j == 0 ? sk.root_order : sk.joints[j].dof;
      for (std::size_t k = 0; k < order.size(); ++k)
        if (is_rotation(order[k])) params_.push_back({static_cast<int>(j), k});
    }
    // a parameter matters only if some target lies in its joint's subtree
    std::vector<bool> has_target(sk.size(), false);
    for (int t : targets_) has_target[static_cast<std::size_t>(t)] = true;
    for (std::size_t j = sk.size(); j-- > 1;)
      if (has_target[j]) has_target[static_cast<std::size_t>(sk.joints[j].parent)] = true;
    subtree_has_target_ = has_target;
  }

  std::size_t parameter_count() const { return params_.size(); }

  /// Solves one frame; `warm` (if non-empty) seeds the search.
  Eigen::VectorXd solve(const std::vector<Vec3>& targets, const Vec3& root_translation, const Eigen::VectorXd& warm,
                        double* max_error, int* worst_target) const {
    Eigen::VectorXd p = warm.size() == static_cast<Eigen::Index>(params_.size()) ? warm : Eigen::VectorXd::Zero(params_.size());
    const std::vector<std::size_t> all_targets = range(targets_.size());
    const std::vector<std::size_t> all_params = relevant_params(range(params_.size()));

    if (warm.size() > 0) {
      lm(p, all_params, all_targets, targets, root_translation);
      if (error_of(p, targets, root_translation, nullptr) <= kReachTolerance) return finish(p, targets, root_translation, max_error, worst_target);
    }
    p = hierarchical(p, targets, root_translation);
    lm(p, all_params, all_targets, targets, root_translation);
    return finish(p, targets, root_translation, max_error, worst_target);
  }

  RawFrame to_frame(const Eigen::VectorXd& p, const Vec3& root_translation) const {
    RawFrame f = zero_frame(*sk_);
    for (std::size_t k = 0; k < sk_->root_order.size(); ++k)
      if (!is_rotation(sk_->root_order[k])) f.channels[0][k] = root_translation[channel_axis(sk_->root_order[k])];
    for (std::size_t i = 0; i < params_.size(); ++i)
      f.channels[static_cast<std::size_t>(params_[i].joint)][params_[i].slot] = p[static_cast<Eigen::Index>(i)];
    return f;
  }

 private:
  struct Param {
    int joint;
    std::size_t slot;
  };

  static std::vector<std::size_t> range(std::size_t n) {
    std::vector<std::size_t> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = i;
    return r;
  }

  std::vector<std::size_t> relevant_params(const std::vector<std::size_t>& candidates) const {
    std::vector<std::size_t> out;
    for (auto i : candidates)
      if (subtree_has_target_[static_cast<std::size_t>(params_[i].joint)]) out.push_back(i);
    return out;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& p, const std::vector<std::size_t>& active, const std::vector<Vec3>& targets,
                           const Vec3& root_translation) const {
    const Pose pose = kin_.pose(to_frame(p, root_translation));
    Eigen::VectorXd r(static_cast<Eigen::Index>(3 * active.size()));
    for (std::size_t i = 0; i < active.size(); ++i)
      r.segment<3>(static_cast<Eigen::Index>(3 * i)) = pose.position[static_cast<std::size_t>(targets_[active[i]])] - targets[active[i]];
    return r;
  }

  double error_of(const Eigen::VectorXd& p, const std::vector<Vec3>& targets, const Vec3& root_translation, int* worst) const {
    const Pose pose = kin_.pose(to_frame(p, root_translation));
    double e = -1.0;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      const double d = (pose.position[static_cast<std::size_t>(targets_[i])] - targets[i]).norm();
      if (d > e) {
        e = d;
        if (worst) *worst = static_cast<int>(i);
      }
    }
    return std::max(e, 0.0);
  }

  /// Levenberg-Marquardt on the `free` parameters against the `active` targets.
  void lm(Eigen::VectorXd& p, const std::vector<std::size_t>& free, const std::vector<std::size_t>& active,
          const std::vector<Vec3>& targets, const Vec3& root_translation) const {
    if (free.empty() || active.empty()) return;
    double lambda = 1e-3;
    Eigen::VectorXd r = residual(p, active, targets, root_translation);
    double cost = r.squaredNorm();
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd jac(r.size(), nf);
    for (int it = 0; it < 200 && cost > 1e-26; ++it) {
      constexpr double h = 1e-7;
      for (Eigen::Index c = 0; c < nf; ++c) {
        const auto idx = static_cast<Eigen::Index>(free[static_cast<std::size_t>(c)]);
        const double keep = p[idx];
        p[idx] = keep + h;
        const Eigen::VectorXd rp = residual(p, active, targets, root_translation);
        p[idx] = keep - h;
        const Eigen::VectorXd rm = residual(p, active, targets, root_translation);
        p[idx] = keep;
        jac.col(c) = (rp - rm) / (2.0 * h);
      }
      const Eigen::MatrixXd a = jac.transpose() * jac;
      const Eigen::VectorXd g = jac.transpose() * r;
      bool improved = false;
      while (lambda < 1e12) {
        Eigen::MatrixXd damped = a;
        for (Eigen::Index d = 0; d < nf; ++d) damped(d, d) += lambda * std::max(a(d, d), 1e-9);
        const Eigen::VectorXd step = damped.ldlt().solve(g);
        Eigen::VectorXd trial = p;
        for (Eigen::Index c = 0; c < nf; ++c) trial[static_cast<Eigen::Index>(free[static_cast<std::size_t>(c)])] -= step[c];
        const Eigen::VectorXd rt = residual(trial, active, targets, root_translation);
        const double ct = rt.squaredNorm();
        if (ct < cost) {
          const double gain = cost - ct;
          p = trial;
          r = rt;
          cost = ct;
          lambda = std::max(lambda / 3.0, 1e-12);
          improved = gain > 1e-15 * cost;
          break;
        }
        lambda *= 4.0;
      }
      if (!improved) break;
    }
  }

  /// Sweeps joints parent-first, fitting each joint together with its
  /// children against targets up to two levels down. Several starts per
  /// joint guard against picking the wrong twist for a hinge below.
  Eigen::VectorXd hierarchical(Eigen::VectorXd p, const std::vector<Vec3>& targets, const Vec3& root_translation) const {
    const Skeleton& sk = *sk_;
    for (std::size_t j = 0; j < sk.size(); ++j) {
      std::vector<std::size_t> own, free;
      std::vector<int> scope{static_cast<int>(j)};
      for (int c : sk.children(static_cast<int>(j))) {
        scope.push_back(c);
        for (int g : sk.children(c)) scope.push_back(g);
      }
      for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].joint == static_cast<int>(j)) own.push_back(i);
        if (params_[i].joint == static_cast<int>(j) || sk.joints[static_cast<std::size_t>(params_[i].joint)].parent == static_cast<int>(j))
          free.push_back(i);
      }
      std::vector<std::size_t> active;
      for (std::size_t t = 0; t < targets_.size(); ++t)
        if (std::find(scope.begin(), scope.end(), targets_[t]) != scope.end() && (targets_[t] != 0)) active.push_back(t);
      free = relevant_params(free);
      if (own.empty() || active.empty()) continue;

      Rng rng(0x5eed + j);
      Eigen::VectorXd best = p;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int start = 0; start < 8; ++start) {
        Eigen::VectorXd trial = p;
        if (start > 0)
          for (auto i : own) trial[static_cast<Eigen::Index>(i)] = uniform(rng, -kPi, kPi);
        lm(trial, free, active, targets, root_translation);
        const double c = residual(trial, active, targets, root_translation).squaredNorm();
        if (c < best_cost) best_cost = c, best = trial;
        if (best_cost < 1e-24) break;
      }
      p = best;
    }
    return p;
  }

  Eigen::VectorXd finish(Eigen::VectorXd p, const std::vector<Vec3>& targets, const Vec3& root_translation, double* max_error,
                         int* worst_target) const {
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = wrap_angle(p[i]);
    int worst = -1;
    const double e = error_of(p, targets, root_translation, &worst);
    if (max_error) *max_error = e;
    if (worst_target) *worst_target = worst;
    return p;
  }

  const Skeleton* sk_;
  Kinematics kin_;
  std::vector<int> targets_;
  std::vector<Param> params_;
  std::vector<bool> subtree_has_target_;
};

struct SolveReport {
  double max_error = 0.0;  // worst joint placement error over all frames
  std::size_t worst_frame = 0;
  std::string worst_joint;
};

/// Inverse kinematics for a whole sequence. In strict mode throws
/// UnreachablePose naming the joint and frame when no channel values place a
/// joint within tolerance; otherwise keeps the closest fit and records the
/// worst error in `report`.
inline RawMotion solve_channels(const Skeleton& sk, const MotionSequence& seq, bool strict = true, SolveReport* report = nullptr) {
  std::vector<int> target_joints;
  for (std::size_t m = 0; m < seq.joints(); ++m) {
    const int j = sk.index_of(seq.joint_names[m]);
    if (j <= 0) throw Error(Errc::ShapeMismatch, "joint '" + seq.joint_names[m] + "' is not in the skeleton");
    const int parent = seq.parents[m] < 0 ? 0 : sk.index_of(seq.joint_names[static_cast<std::size_t>(seq.parents[m])]);
    if (sk.joints[static_cast<std::size_t>(j)].parent != parent)
      throw Error(Errc::ShapeMismatch, "joint '" + seq.joint_names[m] + "' has a different parent in the skeleton");
    target_joints.push_back(j);
  }
  const PoseSolver solver(sk, target_joints);
  RawMotion out;
  Eigen::VectorXd warm;
  std::vector<Vec3> targets(seq.joints());
  for (std::size_t n = 0; n < seq.frames(); ++n) {
    for (std::size_t m = 0; m < seq.joints(); ++m) targets[m] = seq.position(n, m);
    double err = 0.0;
    int worst = -1;
    warm = solver.solve(targets, seq.root_positions[n], warm, &err, &worst);
    if (report && (n == 0 || err > report->max_error)) {
      report->max_error = err;
      report->worst_frame = n;
      report->worst_joint = worst >= 0 ? seq.joint_names[static_cast<std::size_t>(worst)] : "";
    }
    if (strict && err > PoseSolver::kReachTolerance) {
      throw Error(Errc::UnreachablePose, "frame " + std::to_string(n) + ": joint '" +
                                             seq.joint_names[static_cast<std::size_t>(worst)] + "' is off by " +
                                             std::to_string(err) + " units");
    }
    out.frames.push_back(solver.to_frame(warm, seq.root_positions[n]));
  }
  return out;
}

/// AMC text reproducing `seq` on `sk`.
inline std::string export_amc(const Skeleton& sk, const MotionSequence& seq) { return write_amc(sk, solve_channels(sk, seq)); }

/// Like export_amc, but poses the channels cannot reach are replaced by the
/// closest reachable pose instead of failing.
inline std::string export_amc_best_fit(const Skeleton& sk, const MotionSequence& seq, SolveReport* report = nullptr) {
  return write_amc(sk, solve_channels(sk, seq, false, report));
}

}  // namespace sidql

#pragma once

#include "sidql/error.hpp"
#include "sidql/keyframes.hpp"
#include "sidql/reconstruct.hpp"
#include "sidql/spherical.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sidql {

/// Q at or below this (with only the two end keyframes) means the sequence
/// is reproduced by a single cubic and has no normalised error.
inline constexpr double kDegenerateError = 1e-12;

/// Shortest distance between two angles on the circle, in [0, pi].
inline double wrapped_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

struct SectionError {
  double theta = 0.0;
  double phi = 0.0;
  double total() const { return theta + phi; }
};

/// Summed absolute angle error of one section against the source, both end
/// frames and every joint included.
inline SectionError section_error(const SphericalSequence& sph, const Section& s) {
  SectionError e;
  for (std::size_t q = 0; q < s.length(); ++q)
    for (std::size_t m = 0; m < s.joints; ++m) {
      const std::size_t src = sph.at(s.first + q, m), rec = s.at(q, m);
      e.theta += wrapped_distance(s.theta[rec], sph.theta[src]);
      e.phi += wrapped_distance(s.phi[rec], sph.phi[src]);
    }
  return e;
}

struct ErrorReport {
  std::vector<SectionError> sections;
  double mean = 0.0;       // Q(S, K)
  double root_rmse = 0.0;  // diagnostic only, not part of Q
  double seconds = 0.0;
};

/// Full evaluation of a keyframe choice: per-section errors, their mean over
/// N * M, and the root-track RMSE.
inline ErrorReport evaluate(const SphericalSequence& sph, const KeyframeSet& keys) {
  if (keys.frame_count() != sph.frames()) throw Error(Errc::InvalidKeyframeSet, "keyframe set does not match the sequence length");
  const auto start = std::chrono::steady_clock::now();
  ErrorReport report;
  const auto& idx = keys.indices();
  double total = 0.0, root_sq = 0.0;
  for (std::size_t w = 0; w + 1 < idx.size(); ++w) {
    const SectionError e = section_error(sph, reconstruct_section(sph, idx[w], idx[w + 1]));
    report.sections.push_back(e);
    total += e.total();
    const RootSection root = reconstruct_root(sph, idx[w], idx[w + 1]);
    for (std::size_t q = 1; q + 1 < root.positions.size(); ++q)
      root_sq += (root.positions[q] - sph.root_positions[idx[w] + q]).squaredNorm();
  }
  const double nm = static_cast<double>(sph.frames() * sph.joints());
  report.mean = total / nm;
  report.root_rmse = std::sqrt(root_sq / static_cast<double>(sph.frames()));
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Q(S, K): mean wrapped angle error of the reconstruction. Interior
/// keyframes sit in two sections and are summed twice; they contribute zero.
inline double q_error(const SphericalSequence& sph, const KeyframeSet& keys) {
  if (keys.frame_count() != sph.frames()) throw Error(Errc::InvalidKeyframeSet, "keyframe set does not match the sequence length");
  const auto& idx = keys.indices();
  double total = 0.0;
  for (std::size_t w = 0; w + 1 < idx.size(); ++w) total += section_error(sph, reconstruct_section(sph, idx[w], idx[w + 1])).total();
  return total / static_cast<double>(sph.frames() * sph.joints());
}

/// Q with only the first and last frame kept. Throws DegenerateSequence
/// when that is already (numerically) zero.
inline double initial_error(const SphericalSequence& sph) {
  const double q0 = q_error(sph, KeyframeSet::endpoints(sph.frames()));
  if (!(q0 > kDegenerateError))
    throw Error(Errc::DegenerateSequence, "'" + sph.source_id + "' is reproduced from its end frames alone");
  return q0;
}

/// R = 1 - Q(K) / Q({0, N-1}).
inline double normalized_relative_error(const SphericalSequence& sph, const KeyframeSet& keys) {
  const double q0 = initial_error(sph);
  return 1.0 - q_error(sph, keys) / q0;
}

/// Reward for growing `before` into `after` by one frame: the increase in R.
inline double step_reward(const SphericalSequence& sph, const KeyframeSet& before, const KeyframeSet& after) {
  if (after.size() != before.size() + 1 || after.frame_count() != before.frame_count())
    throw Error(Errc::InvalidKeyframeSet, "step must add exactly one keyframe");
  for (auto i : before.indices())
    if (!after.contains(i)) throw Error(Errc::InvalidKeyframeSet, "step may not remove keyframes");
  const double q0 = initial_error(sph);
  return (q_error(sph, before) - q_error(sph, after)) / q0;
}

/// Tracks Q along one episode so each step costs a single evaluation.
class EpisodeScorer {
 public:
  explicit EpisodeScorer(const SphericalSequence& sph) : EpisodeScorer(sph, initial_error(sph)) {}
  EpisodeScorer(const SphericalSequence& sph, double q0)
      : sph_(&sph), q0_(q0), keys_(KeyframeSet::endpoints(sph.frames())), q_(q0) {}

  /// Adds `frame` and returns (Q_before - Q_after) / Q0.
  double add(std::size_t frame) {
    keys_ = keys_.with(frame);
    const double q = q_error(*sph_, keys_);
    const double reward = (q_ - q) / q0_;
    q_ = q;
    return reward;
  }

  const KeyframeSet& keys() const { return keys_; }
  double q0() const { return q0_; }
  double q() const { return q_; }
  double relative_error() const { return 1.0 - q_ / q0_; }

 private:
  const SphericalSequence* sph_;
  double q0_;
  KeyframeSet keys_;
  double q_;
};

using Selector = std::function<KeyframeSet(const SphericalSequence&)>;

struct MeanAngleError {
  double mean = 0.0;
  std::vector<std::optional<double>> per_sequence;  // empty for skipped items
  std::size_t degenerate = 0;
};

/// Average Q over a test set. Degenerate sequences are skipped and counted.
inline MeanAngleError test_mean_angle_error(std::span<const SphericalSequence> dataset, const Selector& select) {
  if (dataset.empty()) throw Error(Errc::EmptyDataset, "no sequences to evaluate");
  MeanAngleError out;
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& sph : dataset) {
    if (!(q_error(sph, KeyframeSet::endpoints(sph.frames())) > kDegenerateError)) {
      ++out.degenerate;
      out.per_sequence.emplace_back();
      continue;
    }
    const double q = q_error(sph, select(sph));
    out.per_sequence.emplace_back(q);
    sum += q;
    ++used;
  }
  if (used == 0) throw Error(Errc::DegenerateSequence, "every sequence in the set is degenerate");
  out.mean = sum / static_cast<double>(used);
  return out;
}

}  // namespace sidql

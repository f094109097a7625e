#pragma once

#include "sidql/error.hpp"
#include "sidql/keyframes.hpp"
#include "sidql/metrics.hpp"
#include "sidql/rng.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sidql {

namespace detail {

inline void check_w(std::size_t n, std::size_t w) {
  if (w < 2 || w > n)
    throw Error(Errc::InvalidW, "keyframe count " + std::to_string(w) + " outside [2, " + std::to_string(n) + "]");
}

}  // namespace detail

/// First and last frame plus W - 2 interior frames drawn without replacement.
inline KeyframeSet select_random(std::size_t n, std::size_t w, std::uint64_t seed) {
  detail::check_w(n, w);
  std::vector<std::size_t> interior;
  for (std::size_t i = 1; i + 1 < n; ++i) interior.push_back(i);
  Rng rng(seed);
  shuffle(interior, rng);
  std::vector<std::size_t> idx{0, n - 1};
  idx.insert(idx.end(), interior.begin(), interior.begin() + static_cast<std::ptrdiff_t>(w - 2));
  return KeyframeSet(n, std::move(idx));
}

/// Frames round((N - 1) w / (W - 1)); a collision moves up to the next free index.
inline KeyframeSet select_uniform(std::size_t n, std::size_t w) {
  detail::check_w(n, w);
  std::vector<bool> used(n, false);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < w; ++i) {
    auto f = static_cast<std::size_t>(std::llround(static_cast<double>(n - 1) * static_cast<double>(i) / static_cast<double>(w - 1)));
    while (f < n && used[f]) ++f;
    if (f >= n) {
      f = n - 1;
      while (used[f]) --f;
    }
    used[f] = true;
    idx.push_back(f);
  }
  return KeyframeSet(n, std::move(idx));
}

/// Index of the candidate whose addition gives the lowest Q; ties go to the
/// lowest index. Returns N when no candidate exists.
inline std::size_t greedy_pick(const SphericalSequence& sph, const KeyframeSet& keys, double* best_q = nullptr) {
  std::size_t best = keys.frame_count();
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t f = 1; f + 1 < keys.frame_count(); ++f) {
    if (keys.contains(f)) continue;
    const double q = q_error(sph, keys.with(f));
    if (q < best_err) {
      best_err = q;
      best = f;
    }
  }
  if (best_q) *best_q = best_err;
  return best;
}

/// Grows {0, N - 1} one frame at a time, each time adding the frame with the
/// lowest resulting Q.
inline KeyframeSet select_greedy(const SphericalSequence& sph, std::size_t w) {
  detail::check_w(sph.frames(), w);
  KeyframeSet keys = KeyframeSet::endpoints(sph.frames());
  if (w == 2) return keys;
  initial_error(sph);
  while (keys.size() < w) keys = keys.with(greedy_pick(sph, keys));
  return keys;
}

}  // namespace sidql

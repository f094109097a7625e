#pragma once

#include "sidql/error.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace sidql {

/// Sorted, distinct keyframe indices of an N-frame sequence. The first and
/// last frame are always members.
class KeyframeSet {
 public:
  KeyframeSet(std::size_t frame_count, std::vector<std::size_t> indices) : n_(frame_count), idx_(std::move(indices)) {
    if (n_ < 2) throw Error(Errc::InvalidKeyframeSet, "sequence needs at least two frames");
    std::sort(idx_.begin(), idx_.end());
    if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end())
      throw Error(Errc::InvalidKeyframeSet, "duplicate keyframe index");
    if (idx_.empty() || idx_.front() != 0 || idx_.back() != n_ - 1)
      throw Error(Errc::InvalidKeyframeSet, "keyframes must include frame 0 and frame " + std::to_string(n_ - 1));
  }

  static KeyframeSet endpoints(std::size_t frame_count) { return KeyframeSet(frame_count, {0, frame_count - 1}); }

  static KeyframeSet all(std::size_t frame_count) {
    std::vector<std::size_t> idx(frame_count);
    for (std::size_t i = 0; i < frame_count; ++i) idx[i] = i;
    return KeyframeSet(frame_count, std::move(idx));
  }

  static KeyframeSet from_mask(const std::vector<bool>& mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) idx.push_back(i);
    return KeyframeSet(mask.size(), std::move(idx));
  }

  const std::vector<std::size_t>& indices() const { return idx_; }
  std::size_t size() const { return idx_.size(); }
  std::size_t frame_count() const { return n_; }
  std::size_t section_count() const { return idx_.size() - 1; }

  bool contains(std::size_t frame) const { return std::binary_search(idx_.begin(), idx_.end(), frame); }

  /// Copy with one more keyframe; `frame` must be a non-member in range.
  KeyframeSet with(std::size_t frame) const {
    if (frame >= n_ || contains(frame))
      throw Error(Errc::InvalidKeyframeSet, "frame " + std::to_string(frame) + " is already a keyframe or out of range");
    std::vector<std::size_t> idx = idx_;
    idx.insert(std::upper_bound(idx.begin(), idx.end(), frame), frame);
    return KeyframeSet(n_, std::move(idx));
  }

  std::vector<bool> mask() const {
    std::vector<bool> m(n_, false);
    for (auto i : idx_) m[i] = true;
    return m;
  }

  bool operator==(const KeyframeSet& other) const = default;

 private:
  std::size_t n_;
  std::vector<std::size_t> idx_;
};

}  // namespace sidql

#pragma once

#include "sidql/error.hpp"
#include "sidql/rng.hpp"

#include <cstddef>
#include <vector>

namespace sidql {

/// Fixed-capacity ring buffer; once full each push overwrites the oldest item.
template <class T>
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw Error(Errc::InvalidArgument, "replay capacity must be positive");
    items_.reserve(capacity);
  }

  void push(T item) {
    if (items_.size() < capacity_) items_.push_back(std::move(item));
    else items_[inserted_ % capacity_] = std::move(item);
    ++inserted_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t inserted() const { return inserted_; }

  /// Items oldest first.
  std::vector<T> contents() const {
    if (items_.size() < capacity_) return items_;
    std::vector<T> out;
    for (std::size_t i = 0; i < capacity_; ++i) out.push_back(items_[(inserted_ + i) % capacity_]);
    return out;
  }

  /// `count` distinct items chosen uniformly at random.
  std::vector<const T*> sample(std::size_t count, Rng& rng) const {
    if (count > items_.size()) throw Error(Errc::InvalidArgument, "batch larger than the replay memory");
    std::vector<std::size_t> idx(items_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<const T*> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, idx.size() - i));
      std::swap(idx[i], idx[j]);
      out.push_back(&items_[idx[i]]);
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t inserted_ = 0;
  std::vector<T> items_;
};

}  // namespace sidql

#pragma once

// Double-ended priority queue backed by a min-max heap: even levels are
// min-ordered, odd levels max-ordered.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace glasscut {

template <class T, class Less = std::less<T>>
class MinMaxHeap {
 public:
  explicit MinMaxHeap(Less less = Less()) : less_(std::move(less)) {}

  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }
  void clear() { data_.clear(); }

  void push(T value) {
    data_.push_back(std::move(value));
    bubble_up(data_.size() - 1);
  }

  const T& min() const {
    if (data_.empty()) throw std::out_of_range("min() on empty heap");
    return data_[0];
  }

  const T& max() const {
    if (data_.empty()) throw std::out_of_range("max() on empty heap");
    return data_[max_index()];
  }

  T pop_min() {
    if (data_.empty()) throw std::out_of_range("pop_min() on empty heap");
    return remove_at(0);
  }

  T pop_max() {
    if (data_.empty()) throw std::out_of_range("pop_max() on empty heap");
    return remove_at(max_index());
  }

 private:
  static bool on_min_level(std::size_t i) {
    int level = 0;
    for (std::size_t k = i + 1; k > 1; k >>= 1) ++level;
    return level % 2 == 0;
  }

  std::size_t max_index() const {
    if (data_.size() == 1) return 0;
    if (data_.size() == 2) return 1;
    return less_(data_[1], data_[2]) ? 2 : 1;
  }

  // a is "better" than b for the ordering of the level being fixed.
  bool better(std::size_t a, std::size_t b, bool min_level) const {
    return min_level ? less_(data_[a], data_[b]) : less_(data_[b], data_[a]);
  }

  void bubble_up(std::size_t i) {
    if (i == 0) return;
    const std::size_t parent = (i - 1) / 2;
    if (on_min_level(i)) {
      if (less_(data_[parent], data_[i])) {
        std::swap(data_[i], data_[parent]);
        bubble_up_grand(parent, false);
      } else {
        bubble_up_grand(i, true);
      }
    } else {
      if (less_(data_[i], data_[parent])) {
        std::swap(data_[i], data_[parent]);
        bubble_up_grand(parent, true);
      } else {
        bubble_up_grand(i, false);
      }
    }
  }

  void bubble_up_grand(std::size_t i, bool min_level) {
    while (i >= 3) {
      const std::size_t grand = ((i - 1) / 2 - 1) / 2;
      if (!better(i, grand, min_level)) break;
      std::swap(data_[i], data_[grand]);
      i = grand;
    }
  }

  void trickle_down(std::size_t i) {
    const bool min_level = on_min_level(i);
    for (;;) {
      const std::size_t first_child = 2 * i + 1;
      if (first_child >= data_.size()) return;
      // Best among children and grandchildren.
      std::size_t m = first_child;
      const std::size_t candidates[] = {first_child + 1, 4 * i + 3, 4 * i + 4, 4 * i + 5, 4 * i + 6};
      for (std::size_t c : candidates)
        if (c < data_.size() && better(c, m, min_level)) m = c;
      if (m <= first_child + 1) {
        if (better(m, i, min_level)) std::swap(data_[m], data_[i]);
        return;
      }
      if (!better(m, i, min_level)) return;
      std::swap(data_[m], data_[i]);
      const std::size_t parent = (m - 1) / 2;
      if (better(parent, m, min_level)) std::swap(data_[m], data_[parent]);
      i = m;
    }
  }

  T remove_at(std::size_t i) {
    T out = std::move(data_[i]);
    if (i + 1 == data_.size()) {
      data_.pop_back();
      return out;
    }
    data_[i] = std::move(data_.back());
    data_.pop_back();
    trickle_down(i);
    return out;
  }

  std::vector<T> data_;
  Less less_;
};

}  // namespace glasscut

#ifndef MOEPGG_REPLAY_BUFFER_HPP
#define MOEPGG_REPLAY_BUFFER_HPP

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace moepgg {

/// Bounded FIFO; once full, each push overwrites the oldest entry.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    items_.reserve(capacity_);
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[head_] = std::move(item);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

  /// Index 0 is the oldest stored item.
  const T& operator[](std::size_t i) const {
    if (i >= items_.size()) throw std::out_of_range("ReplayBuffer: index out of range");
    return items_[(head_ + i) % items_.size()];
  }

  /// Uniform sample with replacement.
  template <typename Rng>
  std::vector<T> sample(std::size_t count, Rng& rng) const {
    if (items_.empty()) throw std::logic_error("ReplayBuffer: sampling from an empty buffer");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(items_[pick(rng)]);
    return out;
  }

  // Raw storage access for checkpointing.
  const std::vector<T>& storage() const { return items_; }
  std::size_t head() const { return head_; }
  void restore(std::vector<T> items, std::size_t head) {
    if (items.size() > capacity_ || (head != 0 && head >= items.size()))
      throw std::invalid_argument("ReplayBuffer::restore: inconsistent state");
    items_ = std::move(items);
    head_ = head;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<T> items_;
};

}  // namespace moepgg

#endif  // MOEPGG_REPLAY_BUFFER_HPP

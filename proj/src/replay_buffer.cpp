#include "dtvec/replay_buffer.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dtvec {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
}

void ReplayBuffer::push(Experience e) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(e));
    return;
  }
  items_[head_] = std::move(e);
  head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("ReplayBuffer::at");
  return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
  if (batch_size > items_.size()) {
    throw std::logic_error("ReplayBuffer: not enough experiences to sample a batch");
  }
  // Floyd's algorithm: batch_size distinct draws without touching all items.
  std::vector<std::size_t> picked;
  picked.reserve(batch_size);
  const std::size_t n = items_.size();
  for (std::size_t j = n - batch_size; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> u(0, j);
    std::size_t t = u(rng);
    if (std::find(picked.begin(), picked.end(), t) != picked.end()) t = j;
    picked.push_back(t);
  }
  return picked;
}

}  // namespace dtvec

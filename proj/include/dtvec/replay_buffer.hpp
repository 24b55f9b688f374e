#pragma once

#include <cstddef>
#include <vector>

#include "dtvec/types.hpp"

namespace dtvec {

// One joint transition. States are the normalized network features of every
// agent, concatenated in agent order; actions are raw actor outputs in [0, 1].
struct Experience {
  Eigen::VectorXd joint_state;
  Eigen::VectorXd joint_action;
  Eigen::VectorXd rewards;  // one per agent
  Eigen::VectorXd next_joint_state;
};

// Bounded FIFO; the oldest experience is evicted once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Experience e);

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }

  // 0 is the oldest stored experience.
  const Experience& at(std::size_t i) const;

  // Uniform sample of distinct positions (valid for at()). Throws
  // std::logic_error when fewer than batch_size experiences are stored.
  std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot of the oldest item once full
  std::vector<Experience> items_;
};

}  // namespace dtvec

#pragma once

#include <cstddef>
#include <vector>

namespace rbq {

// Eventually-constant sequence of positive rates: head[0], head[1], ...,
// followed by `tail` forever. Positions are zero-based; models decide what
// index the first position stands for (mu_1 for service schedules, lambda_0
// for arrival schedules).
class RateSchedule {
 public:
  explicit RateSchedule(double tail);
  RateSchedule(std::vector<double> head, double tail);

  double at(std::size_t position) const noexcept { return position < head_.size() ? head_[position] : tail_; }
  const std::vector<double>& head() const noexcept { return head_; }
  double tail() const noexcept { return tail_; }

  // Drops the first k positions; the tail is unchanged.
  RateSchedule shifted(std::size_t k) const;

  friend bool operator==(const RateSchedule&, const RateSchedule&) = default;

 private:
  std::vector<double> head_;
  double tail_;
};

}  // namespace rbq

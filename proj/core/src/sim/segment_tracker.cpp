#include "rbq/sim/segment_tracker.hpp"

#include <algorithm>

namespace rbq::sim {

SegmentTracker::SegmentTracker(Partition partition, bool record_times)
    : partition_(std::move(partition)), record_times_(record_times) {
  partition_.validate();
}

SegmentTracker::Side SegmentTracker::side_of(std::uint64_t state) const noexcept {
  if (partition_.down.contains(state)) return Side::Down;
  if (partition_.up.contains(state)) return Side::Up;
  return Side::None;
}

void SegmentTracker::start(double, std::uint64_t state) {
  current_ = side_of(state);
  last_entry_ = Side::None;
}

void SegmentTracker::update(double t, std::uint64_t state) {
  const Side next = side_of(state);
  if (next == current_) return;
  current_ = next;
  if (next == Side::None) return;
  const Side previous = last_entry_;
  last_entry_ = next;
  if (previous == Side::None || previous == next) return;

  if (last_segment_ == next) ++violations_;
  last_segment_ = next;
  if (next == Side::Up) {
    ++count_up_;
    if (record_times_) up_ends_.push_back(t);
  } else {
    ++count_down_;
    if (record_times_) down_ends_.push_back(t);
  }
  const std::uint64_t gap = count_up_ > count_down_ ? count_up_ - count_down_ : count_down_ - count_up_;
  max_imbalance_ = std::max(max_imbalance_, gap);
  if (gap > 1) ++violations_;
}

void SegmentTracker::reset_counts() {
  count_up_ = 0;
  count_down_ = 0;
  max_imbalance_ = 0;
  up_ends_.clear();
  down_ends_.clear();
}

}  // namespace rbq::sim

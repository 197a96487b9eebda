#pragma once

#include <cstdint>
#include <vector>

#include "rbq/sim/partition.hpp"

namespace rbq::sim {

// Counts U-segments (paths from D to U through M only) and D-segments for an
// integer-valued trajectory. A segment ends at an entry into one set when the
// previous set entry was into the other one; the initial state counts as no
// entry. The count difference and the alternation of segment types are
// checked on every update.
class SegmentTracker {
 public:
  enum class Side : std::uint8_t { None, Down, Up };

  explicit SegmentTracker(Partition partition, bool record_times = false);

  void start(double t, std::uint64_t state);
  void update(double t, std::uint64_t state);

  // Zeroes the counters (and recorded times) but keeps the entry history, so
  // counts over any later window still differ by at most one.
  void reset_counts();

  const Partition& partition() const noexcept { return partition_; }
  std::uint64_t count_up() const noexcept { return count_up_; }
  std::uint64_t count_down() const noexcept { return count_down_; }
  std::uint64_t max_imbalance() const noexcept { return max_imbalance_; }
  std::uint64_t violations() const noexcept { return violations_; }
  const std::vector<double>& up_segment_ends() const noexcept { return up_ends_; }
  const std::vector<double>& down_segment_ends() const noexcept { return down_ends_; }

 private:
  Side side_of(std::uint64_t state) const noexcept;

  Partition partition_;
  bool record_times_;
  Side current_ = Side::None;     // set containing the current state (None = M)
  Side last_entry_ = Side::None;  // set most recently entered
  Side last_segment_ = Side::None;
  std::uint64_t count_up_ = 0;
  std::uint64_t count_down_ = 0;
  std::uint64_t max_imbalance_ = 0;
  std::uint64_t violations_ = 0;
  std::vector<double> up_ends_;
  std::vector<double> down_ends_;
};

}  // namespace rbq::sim

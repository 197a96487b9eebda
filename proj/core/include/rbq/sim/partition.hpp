#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace rbq::sim {

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

// Finite union of closed integer intervals [lo, hi]; hi == kUnbounded means
// the interval is unbounded above.
struct IntervalSet {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> intervals;

  bool contains(std::uint64_t n) const noexcept;
  bool empty() const noexcept { return intervals.empty(); }
  bool overlaps(const IntervalSet& other) const noexcept;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;
};

// State-space split into D (down), U (up) and the remainder M.
struct Partition {
  IntervalSet down;
  IntervalSet up;
  std::string label;

  // Throws PartitionError unless D and U are nonempty, well formed and disjoint.
  void validate() const;

  // D = [0, level], U = [level + 1, inf), M empty.
  static Partition level_crossing(std::uint64_t level);
  // D = [0, n - 1], M = {n}, U = [n + 1, inf). Requires n >= 1.
  static Partition two_step(std::uint64_t n);

  friend bool operator==(const Partition&, const Partition&) = default;
};

}  // namespace rbq::sim

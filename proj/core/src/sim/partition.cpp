#include "rbq/sim/partition.hpp"

#include "rbq/error.hpp"

namespace rbq::sim {

bool IntervalSet::contains(std::uint64_t n) const noexcept {
  for (const auto& [lo, hi] : intervals) {
    if (n >= lo && n <= hi) return true;
  }
  return false;
}

bool IntervalSet::overlaps(const IntervalSet& other) const noexcept {
  for (const auto& [a, b] : intervals) {
    for (const auto& [c, d] : other.intervals) {
      if (a <= d && c <= b) return true;
    }
  }
  return false;
}

void Partition::validate() const {
  if (down.empty() || up.empty()) throw PartitionError("partition '" + label + "': D and U must be nonempty");
  for (const auto* set : {&down, &up}) {
    for (const auto& [lo, hi] : set->intervals) {
      if (lo > hi) throw PartitionError("partition '" + label + "': interval with lo > hi");
    }
  }
  if (down.overlaps(up)) throw PartitionError("partition '" + label + "': D and U overlap");
}

Partition Partition::level_crossing(std::uint64_t level) {
  return Partition{{{{0, level}}}, {{{level + 1, kUnbounded}}}, "level_" + std::to_string(level)};
}

Partition Partition::two_step(std::uint64_t n) {
  if (n == 0) throw PartitionError("two-step partition needs n >= 1");
  return Partition{{{{0, n - 1}}}, {{{n + 1, kUnbounded}}}, "tst_" + std::to_string(n)};
}

}  // namespace rbq::sim

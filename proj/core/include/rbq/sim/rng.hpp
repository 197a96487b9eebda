#pragma once

#include <cstdint>

namespace rbq::sim {

// Counter-based stream: the i-th draw is a pure function of (key, i), so a
// replication's variates do not depend on how other streams are consumed.
class RandomStream {
 public:
  enum class Purpose : std::uint64_t { Arrival = 1, Service = 2 };

  RandomStream(std::uint64_t seed, std::uint64_t replication, Purpose purpose) noexcept
      : key_(mix(mix(seed) ^ mix(replication * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(purpose)))) {}

  std::uint64_t next() noexcept { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  // Uniform on the open interval (0, 1).
  double operator()() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t counter() const noexcept { return counter_; }

  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rbq::sim

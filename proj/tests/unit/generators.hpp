#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rbq/distribution.hpp"

// Hand-rolled generators for property tests; fixed seeds keep failures
// reproducible.
namespace rbq::testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  // One instance of a random family with mean roughly in [0.2, 3].
  DistributionSpec distribution() {
    switch (integer(0, 4)) {
      case 0:
        return DistributionSpec::exponential(uniform(0.4, 4.0));
      case 1:
        return DistributionSpec::deterministic(uniform(0.2, 2.5));
      case 2: {
        const int k = integer(1, 4);
        return DistributionSpec::erlang(k, k * uniform(0.4, 4.0));
      }
      case 3: {
        const double p = uniform(0.1, 0.9);
        return DistributionSpec::hyperexponential({p, 1.0 - p}, {uniform(0.3, 1.5), uniform(1.5, 6.0)});
      }
      default: {
        const double lo = uniform(0.0, 1.0);
        return DistributionSpec::uniform(lo, lo + uniform(0.1, 2.0));
      }
    }
  }

  // One instance of each family.
  static std::vector<DistributionSpec> family_zoo() {
    return {DistributionSpec::exponential(2.0), DistributionSpec::deterministic(1.0), DistributionSpec::erlang(2, 2.0),
            DistributionSpec::hyperexponential({0.3, 0.7}, {0.5, 3.0}), DistributionSpec::uniform(0.5, 1.5)};
  }

 private:
  std::mt19937_64 eng_;
};

inline const std::vector<double>& s_grid() {
  static const std::vector<double> g{0.25, 0.5, 1.0, 2.0, 4.0};
  return g;
}

// {0, 0.1, ..., 10}
inline std::vector<double> fine_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 100; ++i) g.push_back(0.1 * i);
  return g;
}

}  // namespace rbq::testgen

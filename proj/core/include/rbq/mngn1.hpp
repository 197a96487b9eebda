#pragma once

#include <cstddef>
#include <vector>

#include "rbq/distribution.hpp"
#include "rbq/rate_schedule.hpp"
#include "rbq/transform.hpp"

namespace rbq::mngn1 {

// Mn/Gn/1: Poisson arrivals at rate lambda_n while n are present, service
// times drawn from G_n where n counts the customers present when the service
// starts. lambda.at(0) is lambda_0; services[0] is G_1.
struct MnGn1Model {
  RateSchedule lambda;
  std::vector<DistributionSpec> services;
  DistributionSpec service_tail;  // G_n for n > services.size()

  double lambda_at(std::size_t n) const noexcept { return lambda.at(n); }
  // G_n for n >= 1.
  const DistributionSpec& service_at(std::size_t n) const noexcept {
    return n <= services.size() ? services[n - 1] : service_tail;
  }
  // Throws InstabilityError unless lambda_tail * mean(G_tail) < 1.
  void check_stable() const;
};

struct MnGn1Solution {
  std::vector<Transform> residuals;  // residuals[n-1] = R*_n, n = 1..n_stable
  std::vector<double> ratios;        // ratios[n-1] = pi_n / pi_{n-1}
  std::vector<double> pi;            // time-average probabilities
  double tail_ratio;                 // stabilized ratio used to complete the tail
};

inline constexpr std::size_t kDefaultMaxLevels = 500;

// Forward recursion R_1 = D_{lambda_1,G_1},
//   R_n = (1 - G*_n(lambda_n)) D_{lambda_n,G_n} + G*_n(lambda_n) D_{lambda_n,R_{n-1}}.
// Returns R*_1 .. R*_{n_max}.
std::vector<Transform> residuals_mngn1(const MnGn1Model& model, std::size_t n_max);

// Probability that an arrival finding n >= 2 is the first arrival of the
// current service: 1 - G*_n(lambda_n). Throws DomainError for n < 2.
double first_arrival_prob(const MnGn1Model& model, std::size_t n);

// Birth-death-like balance
//   pi_{n-1} lambda_{n-1} (1 - R*_{n-1}(lambda_n)) = pi_n lambda_n G*_n(lambda_n),  R*_0 = G*_1,
// iterated until successive ratios agree to 1e-10 over 10 levels; the
// remaining mass is a geometric tail with the stabilized ratio.
MnGn1Solution steady_state_mngn1(const MnGn1Model& model, std::size_t n_max = kDefaultMaxLevels);

}  // namespace rbq::mngn1

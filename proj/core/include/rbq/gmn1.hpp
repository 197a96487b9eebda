#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rbq/distribution.hpp"
#include "rbq/rate_schedule.hpp"
#include "rbq/transform.hpp"

namespace rbq::gmn1 {

// G/Mn/1: renewal arrivals, exponential service whose rate depends on the
// number in system. mu.at(0) is mu_1.
struct Gmn1Model {
  DistributionSpec inter_arrival;
  RateSchedule mu;

  double arrival_rate() const noexcept { return 1.0 / inter_arrival.mean(); }
  // mu_n for n >= 1.
  double mu_at(std::size_t n) const noexcept { return mu.at(n - 1); }
  // Throws InstabilityError unless arrival rate < mu.tail().
  void check_stable() const;
};

struct Gmn1Solution {
  std::vector<Transform> residuals;  // R*_0 .. R*_N, N = head length
  std::vector<double> ratios;        // ratios[n-1] = a_n / a_{n-1}, n = 1..head+1
  std::vector<double> a;             // arrival-epoch probabilities
  std::vector<double> pi;            // time-average probabilities
  double sigma_tail;                 // geometric ratio beyond the head

  // R*_n; indices past the head reuse the tail transform.
  const Transform& residual(std::size_t n) const { return residuals[std::min(n, residuals.size() - 1)]; }
};

// Tail-anchored backward recursion
//   R*_n = (1 - G*(mu_{n+1})) D*_{mu_{n+1},G} + G*(mu_{n+1}) D*_{mu_{n+1},R_{n+1}}
// started from the G/M/1 residual of the constant tail.
std::vector<Transform> residuals_gmn1(const Gmn1Model& model);

Gmn1Solution steady_state_gmn1(const Gmn1Model& model);

// Probability that a departure leaving n behind is the first departure of
// the current inter-arrival time: 1 - G*(mu_{n+1}).
double first_departure_prob(const Gmn1Model& model, std::size_t n);

// Model with mu'_n = mu_{n+k}.
Gmn1Model shift_model(const Gmn1Model& model, std::size_t k);

// G/M/c as G/Mn/1 with mu_n = min(n, c) mu.
Gmn1Model build_gmc(const DistributionSpec& inter_arrival, int servers, double mu);

// One step of the recursion in the increasing direction: recovers R*_{n+1}
// from R*_n by solving for D*_{mu_{n+1},R_{n+1}} and inverting D. Without an
// explicit gamma the density at zero is estimated numerically.
Transform reverse_residual(const Gmn1Model& model, const Transform& r_n, std::size_t n,
                           std::optional<double> gamma = std::nullopt);

}  // namespace rbq::gmn1

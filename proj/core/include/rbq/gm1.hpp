#pragma once

#include <cstddef>
#include <vector>

#include "rbq/distribution.hpp"
#include "rbq/transform.hpp"

namespace rbq::gm1 {

struct Gm1Model {
  DistributionSpec inter_arrival;
  double mu;  // service rate

  double arrival_rate() const noexcept { return 1.0 / inter_arrival.mean(); }
  double rho() const noexcept { return arrival_rate() / mu; }
  // Throws InstabilityError unless arrival rate < mu.
  void check_stable() const;
};

struct Gm1Solution {
  double sigma;
  double rho;
  std::vector<double> a;   // arrival-epoch probabilities, truncated where sigma^n < 1e-12
  std::vector<double> pi;  // time-average probabilities, same length as a
  double sojourn_rate;     // FCFS sojourn time is exponential with this rate
  Transform residual;      // residual inter-arrival time at departures

  // Closed forms, valid for any n.
  double a_at(std::size_t n) const;
  double pi_at(std::size_t n) const;
};

// Root of sigma = G*(mu (1 - sigma)) in (0, 1).
double solve_sigma(const Gm1Model& model);

Gm1Solution steady_state(const Gm1Model& model);

// D_{mu(1-sigma), G}; equals mu (G*(s) - sigma) / (mu (1 - sigma) - s).
Transform residual_lst(const Gm1Model& model, double sigma);

// Number of geometric terms emitted for ratio sigma.
std::size_t geometric_length(double sigma);

}  // namespace rbq::gm1

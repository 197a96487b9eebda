#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rbq/distribution.hpp"
#include "rbq/rate_schedule.hpp"

// Brute-force references for the analytic modules. Nothing here calls the
// transform calculus or the queue solvers; the only shared code is
// DistributionSpec (closed-form LSTs, densities) and RateSchedule.
namespace rbq::oracles {

struct DiscreteDist {
  std::vector<double> probs;  // support 0..probs.size()-1
  double tail_mass = 0.0;     // estimated mass beyond the support
};

struct ChainSolution {
  DiscreteDist arrival_epoch;
  DiscreteDist time_average;
};

// E[f(X)] for X ~ dist, by adaptive Gauss-Kronrod quadrature (exact for the
// deterministic family).
double expect(const DistributionSpec& dist, const std::function<double(double)>& f);

// Density, CDF and LST of D_{lambda,F} from the double-integral expression
//   D(w) = int_0^w lambda e^{lambda u} int_u^inf e^{-lambda x} dF(x) du / (1 - F*(lambda)).
double numeric_d_density(const DistributionSpec& f, double lambda, double w);
double numeric_d_cdf(const DistributionSpec& f, double lambda, double w);
double numeric_d_lst(const DistributionSpec& f, double lambda, double s);

// Plain bisection of sigma - G*(mu (1 - sigma)) on (1e-9, 1 - 1e-9).
double sigma_bisect(const DistributionSpec& g, double mu);

// Default truncation: 10 / (1 - rho) states, at least 200.
std::size_t default_truncation(double rho);

// Classical arrival-epoch chain of G/M/c, solved directly on a truncated
// state space; time averages follow from a_{n-1} lambda = pi_n min(n,c) mu.
ChainSolution embedded_chain_gmc(const DistributionSpec& g, int servers, double mu, std::size_t trunc);

// Departure-epoch chain of M/G/1 (equal to the time-average distribution).
DiscreteDist embedded_chain_mg1(double lambda, const DistributionSpec& service, std::size_t trunc);

// pi_{n+1} = pi_n birth_n / death_{n+1}; birth.at(n) is birth_n (n >= 0),
// death.at(n) is death_{n+1}.
DiscreteDist birth_death_solve(const RateSchedule& birth, const RateSchedule& death, std::size_t trunc);

}  // namespace rbq::oracles

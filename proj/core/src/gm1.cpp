#include "rbq/gm1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rbq/error.hpp"

namespace rbq::gm1 {
namespace {

constexpr double kBracketEps = 1e-9;
constexpr double kTolerance = 1e-12;
// Iteration continues past kTolerance down to this residual (or a collapsed
// bracket) so the root itself, not just the residual, is accurate to ~1e-15.
constexpr double kPolish = 1e-16;
constexpr int kMaxIterations = 200;
constexpr std::size_t kMaxTerms = 10000;

}  // namespace

void Gm1Model::check_stable() const {
  if (!std::isfinite(mu) || mu <= 0.0) throw DomainError("service rate mu must be positive");
  if (!(arrival_rate() < mu)) {
    throw InstabilityError("G/M/1 queue is unstable: requires arrival rate " + std::to_string(arrival_rate()) +
                           " < service rate mu " + std::to_string(mu));
  }
}

double Gm1Solution::a_at(std::size_t n) const { return (1.0 - sigma) * std::pow(sigma, static_cast<double>(n)); }

double Gm1Solution::pi_at(std::size_t n) const {
  if (n == 0) return 1.0 - rho;
  return rho * (1.0 - sigma) * std::pow(sigma, static_cast<double>(n - 1));
}

// Alternates a fixed-point step (kept only if it lands inside the bracket)
// with a bisection step; the bracket halves at least every other iteration.
double solve_sigma(const Gm1Model& model) {
  model.check_stable();
  const auto& g = model.inter_arrival;
  const auto residual = [&](double x) { return x - g.lst(model.mu * (1.0 - x)); };

  double lo = kBracketEps;
  double hi = 1.0 - kBracketEps;
  if (!(residual(lo) < 0.0 && residual(hi) > 0.0)) {
    throw NumericError("sigma equation has no sign change on (1e-9, 1-1e-9); load too close to 1");
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxIterations; ++it) {
    double candidate = (it % 2 == 0) ? g.lst(model.mu * (1.0 - x)) : 0.5 * (lo + hi);
    if (!(candidate > lo && candidate < hi)) candidate = 0.5 * (lo + hi);
    x = candidate;
    const double r = residual(x);
    if (std::abs(r) <= kPolish) return x;
    if (r < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
  }
  if (std::abs(residual(x)) <= kTolerance) return x;
  throw NumericError("sigma solver did not reach |residual| <= 1e-12");
}

std::size_t geometric_length(double sigma) {
  if (sigma <= 0.0) return 1;
  const double n = std::ceil(std::log(1e-12) / std::log(sigma));
  if (!std::isfinite(n) || n > static_cast<double>(kMaxTerms)) return kMaxTerms;
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

Transform residual_lst(const Gm1Model& model, double sigma) {
  return d_operator(Transform::base(model.inter_arrival), model.mu * (1.0 - sigma));
}

Gm1Solution steady_state(const Gm1Model& model) {
  const double sigma = solve_sigma(model);
  Gm1Solution sol{sigma, model.rho(), {}, {}, model.mu * (1.0 - sigma), residual_lst(model, sigma)};
  const std::size_t n = geometric_length(sigma);
  sol.a.resize(n + 1);
  sol.pi.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    sol.a[k] = sol.a_at(k);
    sol.pi[k] = sol.pi_at(k);
  }
  return sol;
}

}  // namespace rbq::gm1

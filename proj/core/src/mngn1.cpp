#include "rbq/mngn1.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbq/error.hpp"

namespace rbq::mngn1 {
namespace {

constexpr double kStableRatioTol = 1e-10;
constexpr std::size_t kStableRun = 10;
constexpr double kTailMass = 1e-14;

Transform next_residual(const MnGn1Model& model, std::size_t n, const Transform* previous) {
  const double rate = model.lambda_at(n);
  const auto& service = model.service_at(n);
  const Transform fresh = d_operator(Transform::base(service), rate);
  if (previous == nullptr) return fresh;
  const double stay = service.lst(rate);
  return mix({1.0 - stay, stay}, {fresh, d_operator(*previous, rate)});
}

}  // namespace

void MnGn1Model::check_stable() const {
  const double load = lambda.tail() * service_tail.mean();
  if (!(load < 1.0)) {
    throw InstabilityError("Mn/Gn/1 queue is unstable: requires tail arrival rate x tail mean service " +
                           std::to_string(load) + " < 1");
  }
}

std::vector<Transform> residuals_mngn1(const MnGn1Model& model, std::size_t n_max) {
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  std::vector<Transform> out;
  out.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) out.push_back(next_residual(model, n, n == 1 ? nullptr : &out.back()));
  return out;
}

double first_arrival_prob(const MnGn1Model& model, std::size_t n) {
  if (n < 2) throw DomainError("first-arrival probability is defined for n >= 2");
  return 1.0 - model.service_at(n).lst(model.lambda_at(n));
}

MnGn1Solution steady_state_mngn1(const MnGn1Model& model, std::size_t n_max) {
  model.check_stable();
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  const std::size_t structured = std::max(model.lambda.head().size(), model.services.size());

  MnGn1Solution sol;
  std::size_t run = 0;
  bool stable = false;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double rate = model.lambda_at(n);
    // 1 - R*_{n-1}(lambda_n) with R*_0 = G*_1.
    const double up = 1.0 - (n == 1 ? model.service_at(1).lst(rate) : sol.residuals.back().eval(rate));
    const double down = model.service_at(n).lst(rate);
    if (!(down > 0.0)) throw NumericError("G*_n(lambda_n) vanished at n = " + std::to_string(n));
    sol.ratios.push_back(model.lambda_at(n - 1) * up / (rate * down));
    sol.residuals.push_back(next_residual(model, n, n == 1 ? nullptr : &sol.residuals.back()));

    if (n > structured + 1 && sol.ratios.size() >= 2) {
      const double diff = std::abs(sol.ratios[n - 1] - sol.ratios[n - 2]);
      run = diff < kStableRatioTol ? run + 1 : 0;
      if (run >= kStableRun) {
        stable = true;
        break;
      }
    }
  }
  if (!stable) {
    throw NormalizationError("pi ratios did not stabilize within n_max = " + std::to_string(n_max) + " levels");
  }
  sol.tail_ratio = sol.ratios.back();
  if (!(sol.tail_ratio < 1.0)) {
    throw NormalizationError("stabilized pi ratio " + std::to_string(sol.tail_ratio) + " is not below 1");
  }

  // Extend geometrically until the remaining mass is negligible.
  std::vector<double> u{1.0};
  for (double r : sol.ratios) u.push_back(u.back() * r);
  while (u.back() > kTailMass * u.front() && u.size() < 100000) u.push_back(u.back() * sol.tail_ratio);
  double total = 0.0;
  for (double x : u) total += x;
  total += u.back() * sol.tail_ratio / (1.0 - sol.tail_ratio);
  sol.pi.resize(u.size());
  std::transform(u.begin(), u.end(), sol.pi.begin(), [total](double x) { return x / total; });
  return sol;
}

}  // namespace rbq::mngn1

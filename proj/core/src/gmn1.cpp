#include "rbq/gmn1.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbq/error.hpp"
#include "rbq/gm1.hpp"

namespace rbq::gmn1 {

void Gmn1Model::check_stable() const {
  if (!(arrival_rate() < mu.tail())) {
    throw InstabilityError("G/Mn/1 queue is unstable: requires arrival rate " + std::to_string(arrival_rate()) +
                           " < tail service rate " + std::to_string(mu.tail()));
  }
}

std::vector<Transform> residuals_gmn1(const Gmn1Model& model) {
  model.check_stable();
  const std::size_t head = model.mu.head().size();
  const gm1::Gm1Model tail{model.inter_arrival, model.mu.tail()};
  const Transform g = Transform::base(model.inter_arrival);

  std::vector<Transform> out(head + 1, gm1::residual_lst(tail, gm1::solve_sigma(tail)));
  for (std::size_t n = head; n-- > 0;) {
    const double rate = model.mu_at(n + 1);
    const double stay = model.inter_arrival.lst(rate);
    out[n] = mix({1.0 - stay, stay}, {d_operator(g, rate), d_operator(out[n + 1], rate)});
  }
  return out;
}

Gmn1Solution steady_state_gmn1(const Gmn1Model& model) {
  model.check_stable();
  const std::size_t head = model.mu.head().size();
  const gm1::Gm1Model tail{model.inter_arrival, model.mu.tail()};
  const double sigma = gm1::solve_sigma(tail);
  if (!(sigma < 1.0)) throw NormalizationError("tail ratio is not below 1");

  Gmn1Solution sol{residuals_gmn1(model), {}, {}, {}, sigma};
  for (std::size_t n = 1; n <= head; ++n) {
    const double rate = model.mu_at(n);
    const double up = model.inter_arrival.lst(rate);
    const double down = 1.0 - sol.residual(n).eval(rate);
    if (!(down > 0.0)) throw NumericError("two-step down probability vanished at n = " + std::to_string(n));
    sol.ratios.push_back(up / down);
  }
  sol.ratios.push_back(sigma);

  const auto extra = static_cast<std::size_t>(std::max(50.0, std::ceil(std::log(1e-12) / std::log(sigma))));
  const std::size_t last = head + std::min<std::size_t>(extra, 100000);

  std::vector<double> u(last + 1);
  u[0] = 1.0;
  for (std::size_t n = 1; n <= last; ++n) u[n] = u[n - 1] * sol.ratios[std::min(n, head + 1) - 1];
  double total = 0.0;
  for (double x : u) total += x;
  total += u[last] * sigma / (1.0 - sigma);
  sol.a.resize(last + 1);
  for (std::size_t n = 0; n <= last; ++n) sol.a[n] = u[n] / total;

  // Level crossing: a_{n-1} lambda = pi_n mu_n.
  const double lambda = model.arrival_rate();
  sol.pi.resize(last + 1);
  double busy = 0.0;
  for (std::size_t n = 1; n <= last; ++n) {
    sol.pi[n] = lambda * sol.a[n - 1] / model.mu_at(n);
    busy += sol.pi[n];
  }
  busy += lambda / model.mu.tail() * sol.a[last] / (1.0 - sigma);
  sol.pi[0] = 1.0 - busy;
  if (!(sol.pi[0] > 0.0)) throw NormalizationError("time-average probabilities do not normalize (pi_0 <= 0)");
  return sol;
}

double first_departure_prob(const Gmn1Model& model, std::size_t n) {
  return 1.0 - model.inter_arrival.lst(model.mu_at(n + 1));
}

Gmn1Model shift_model(const Gmn1Model& model, std::size_t k) { return {model.inter_arrival, model.mu.shifted(k)}; }

Gmn1Model build_gmc(const DistributionSpec& inter_arrival, int servers, double mu) {
  if (servers < 1) throw DomainError("G/M/c needs at least one server");
  if (!std::isfinite(mu) || mu <= 0.0) throw DomainError("per-server rate must be positive");
  std::vector<double> head;
  for (int n = 1; n < servers; ++n) head.push_back(n * mu);
  Gmn1Model model{inter_arrival, RateSchedule(std::move(head), servers * mu)};
  model.check_stable();
  return model;
}

Transform reverse_residual(const Gmn1Model& model, const Transform& r_n, std::size_t n, std::optional<double> gamma) {
  const double rate = model.mu_at(n + 1);
  const double stay = model.inter_arrival.lst(rate);
  if (!(stay > 0.0)) throw NumericError("cannot invert the recursion when G*(mu_{n+1}) = 0");
  const Transform fresh = d_operator(Transform::base(model.inter_arrival), rate);
  const Transform carried = affine_combination({1.0 / stay, -(1.0 - stay) / stay}, {r_n, fresh});
  return inverse_d(carried, gamma.value_or(estimate_density_at_zero(carried)), rate);
}

}  // namespace rbq::gmn1

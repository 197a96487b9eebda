#include "rbq/oracles.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>

#include "rbq/error.hpp"

namespace rbq::oracles {
namespace {

constexpr double kAbsTol = 1e-8;
constexpr unsigned kMaxDepth = 17;  // 2^17 > 10^5 subintervals
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F f, double a, double b, double rel_tol = 1e-13) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, kMaxDepth, rel_tol, &err);
  if (!std::isfinite(v) || err > kAbsTol) {
    throw NumericError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                       "], error estimate " + std::to_string(err));
  }
  return v;
}

double poisson_pmf(std::size_t k, double mean) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kk = static_cast<double>(k);
  return std::exp(kk * std::log(mean) - mean - std::lgamma(kk + 1.0));
}

double binomial(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

// J(u) = int_u^inf e^{-lambda (x - u)} dF(x).
// Outer integrals over an inner quadrature cannot resolve below the inner noise.
constexpr double kNestedTol = 1e-10;

double upper_tail_weight(const DistributionSpec& f, double lambda, double u) {
  if (const auto* d = std::get_if<DistributionSpec::Deterministic>(&f.family())) {
    return u <= d->value ? std::exp(-lambda * (d->value - u)) : 0.0;
  }
  if (const auto* un = std::get_if<DistributionSpec::Uniform>(&f.family())) {
    const double m = std::max(u, un->lo);
    if (m >= un->hi) return 0.0;
    return std::exp(-lambda * (m - u)) * -std::expm1(-lambda * (un->hi - m)) / (lambda * (un->hi - un->lo));
  }
  return integrate([&](double x) { return std::exp(-lambda * (x - u)) * f.pdf(x); }, u, kInf);
}

// Support end of D_{lambda,F} (infinite for unbounded F) and interior kinks.
double support_end(const DistributionSpec& f) {
  if (const auto* d = std::get_if<DistributionSpec::Deterministic>(&f.family())) return d->value;
  if (const auto* u = std::get_if<DistributionSpec::Uniform>(&f.family())) return u->hi;
  return kInf;
}

std::vector<double> breakpoints(const DistributionSpec& f, double lo, double hi) {
  std::vector<double> pts{lo};
  if (const auto* u = std::get_if<DistributionSpec::Uniform>(&f.family())) {
    if (u->lo > lo && u->lo < hi) pts.push_back(u->lo);
  }
  pts.push_back(hi);
  return pts;
}

template <class F>
double integrate_pieces(F f, const std::vector<double>& pts, double rel_tol = 1e-13) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += integrate(f, pts[i], pts[i + 1], rel_tol);
  return total;
}

double no_mass_check(const DistributionSpec& f, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("rate must be positive");
  const double q = 1.0 - f.lst(lambda);
  if (q <= 1e-12) throw DegenerateInputError("F*(lambda) = 1");
  return q;
}

// Stationary vector of a (row-)stochastic matrix by a direct solve of
// x (P - I) = 0 with one equation replaced by sum x = 1.
std::vector<double> stationary(const Eigen::MatrixXd& p) {
  const Eigen::Index n = p.rows();
  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd x = a.partialPivLu().solve(b);
  std::vector<double> out(x.data(), x.data() + n);
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

void add_panels(Rule& rule, double a, double b, int panels, const std::function<double(double)>& density) {
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = Gauss::abscissa();
  const auto& ws = Gauss::weights();
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double x = mid + sign * 0.5 * width * xs[i];
        rule.nodes.push_back(x);
        rule.weights.push_back(0.5 * width * ws[i] * density(x));
      }
    }
  }
}

// Fixed rule with E f(T) ~ sum w_i f(t_i), reused across many integrands.
Rule expectation_rule(const DistributionSpec& dist) {
  Rule rule;
  const auto& fam = dist.family();
  if (const auto* d = std::get_if<DistributionSpec::Deterministic>(&fam)) {
    rule.nodes = {d->value};
    rule.weights = {1.0};
    return rule;
  }
  if (const auto* u = std::get_if<DistributionSpec::Uniform>(&fam)) {
    add_panels(rule, u->lo, u->hi, 64, [w = u->hi - u->lo](double) { return 1.0 / w; });
    return rule;
  }
  double end = 1.0;
  while (1.0 - dist.cdf(end) > 1e-18 && dist.pdf(end) * end > 1e-19) end *= 1.25;
  add_panels(rule, 0.0, end, 400, [&](double x) { return dist.pdf(x); });
  return rule;
}

double apply(const Rule& rule, const std::function<double(double)>& f) {
  // Neumaier summation; thousands of nodes otherwise drift by ~1e-14.
  double total = 0.0;
  double carry = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double term = rule.weights[i] * f(rule.nodes[i]);
    const double next = total + term;
    carry += std::abs(total) >= std::abs(term) ? (total - next) + term : (term - next) + total;
    total = next;
  }
  return total + carry;
}

double geometric_tail(const std::vector<double>& probs) {
  const std::size_t n = probs.size();
  if (n < 2 || probs[n - 2] <= 0.0 || probs[n - 1] < 1e-15) return 0.0;
  const double r = probs[n - 1] / probs[n - 2];
  if (r >= 1.0) return kInf;
  return probs[n - 1] * r / (1.0 - r);
}

void require_small_tail(const std::vector<double>& probs) {
  if (probs.back() > 1e-10) {
    throw NormalizationError("truncation too small: mass " + std::to_string(probs.back()) + " in the last state");
  }
}

}  // namespace

double expect(const DistributionSpec& dist, const std::function<double(double)>& f) {
  const auto& fam = dist.family();
  if (const auto* d = std::get_if<DistributionSpec::Deterministic>(&fam)) return f(d->value);
  if (const auto* u = std::get_if<DistributionSpec::Uniform>(&fam)) {
    return integrate(f, u->lo, u->hi) / (u->hi - u->lo);
  }
  if (const auto* h = std::get_if<DistributionSpec::HyperExponential>(&fam)) {
    double total = 0.0;
    for (std::size_t i = 0; i < h->probs.size(); ++i) {
      const double r = h->rates[i];
      total += h->probs[i] * integrate([&](double x) { return f(x) * r * std::exp(-r * x); }, 0.0, kInf);
    }
    return total;
  }
  return integrate([&](double x) { return f(x) * dist.pdf(x); }, 0.0, kInf);
}

double numeric_d_density(const DistributionSpec& f, double lambda, double w) {
  const double q = no_mass_check(f, lambda);
  if (w < 0.0) return 0.0;
  return lambda * upper_tail_weight(f, lambda, w) / q;
}

double numeric_d_cdf(const DistributionSpec& f, double lambda, double w) {
  const double q = no_mass_check(f, lambda);
  if (w <= 0.0) return 0.0;
  const double hi = std::min(w, support_end(f));
  const double v = integrate_pieces([&](double u) { return lambda * upper_tail_weight(f, lambda, u); },
                                    breakpoints(f, 0.0, hi), kNestedTol);
  return std::clamp(v / q, 0.0, 1.0);
}

double numeric_d_lst(const DistributionSpec& f, double lambda, double s) {
  const double q = no_mass_check(f, lambda);
  if (s < 0.0) throw DomainError("LST argument must be nonnegative");
  const double v = integrate_pieces(
      [&](double u) { return std::exp(-s * u) * lambda * upper_tail_weight(f, lambda, u); },
      breakpoints(f, 0.0, support_end(f)), kNestedTol);
  return v / q;
}

double sigma_bisect(const DistributionSpec& g, double mu) {
  auto f = [&](double x) { return x - g.lst(mu * (1.0 - x)); };
  const double lo = 1e-9;
  const double hi = 1.0 - 1e-9;
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) throw NumericError("sigma bisection: no sign change on (1e-9, 1 - 1e-9)");
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, [](double x, double y) { return y - x < 1e-13; });
  return 0.5 * (a + b);
}

std::size_t default_truncation(double rho) {
  if (!(rho < 1.0)) throw InstabilityError("truncation needs rho < 1");
  return std::max<std::size_t>(200, static_cast<std::size_t>(std::ceil(10.0 / (1.0 - rho))));
}

ChainSolution embedded_chain_gmc(const DistributionSpec& g, int servers, double mu, std::size_t trunc) {
  if (servers < 1 || !(mu > 0.0)) throw DomainError("G/M/c oracle needs c >= 1 and mu > 0");
  const double lambda = 1.0 / g.mean();
  const int c = servers;
  const double cmu = c * mu;
  if (!(lambda < cmu)) throw InstabilityError("G/M/c oracle: lambda must be below c mu");
  const std::size_t n = trunc + 1;
  const Rule rule = expectation_rule(g);

  // beta_m = P(m departures during an inter-arrival, all servers busy).
  std::vector<double> beta(n + 1, 0.0);
  double mass = 0.0;
  for (std::size_t m = 0; m <= n && mass < 1.0 - 1e-16; ++m) {
    beta[m] = apply(rule, [&](double t) { return poisson_pmf(m, cmu * t); });
    mass += beta[m];
  }

  // Transition from k = i + 1 present (after the arrival) to j found by the
  // next arrival, for j < c, given the inter-arrival time t.
  auto low_given_t = [&](int k, int j, double t) {
    if (k <= c) {
      const double e = std::exp(-mu * t);
      return binomial(k, j) * std::pow(e, j) * std::pow(1.0 - e, k - j);
    }
    // All c busy until the (k - c)-th departure at Erlang time tau, then
    // c servers drain independently over t - tau.
    // Expanding (1 - e^{-mu x})^{c-j} binomially, each term integrates in closed
    // form against the Erlang(m, c mu) density.
    const int m = k - c;
    double total = 0.0;
    for (int i = 0; i <= c - j; ++i) {
      const int a = j + i;
      double term = 0.0;
      if (a == c) {
        term = poisson_pmf(static_cast<std::size_t>(m), cmu * t);
      } else {
        const double g = boost::math::gamma_p(static_cast<double>(m), (c - a) * mu * t);
        if (g > 0.0) term = std::exp(-a * mu * t + m * std::log(static_cast<double>(c) / (c - a)) + std::log(g));
      }
      total += ((i % 2 == 0) ? 1.0 : -1.0) * binomial(c - j, i) * term;
    }
    return std::max(0.0, binomial(c, j) * total);
  };

  // reach[m] = P(at least m departures at rate c mu during an inter-arrival).
  std::vector<double> reach(n + 2, 0.0);
  reach[0] = 1.0;
  for (std::size_t m = 0; m <= n; ++m) reach[m + 1] = std::max(0.0, reach[m] - beta[m]);

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const int k = static_cast<int>(i) + 1;
    double row = 0.0;
    for (int j = std::min<int>(k, static_cast<int>(trunc)); j >= 1; --j) {
      double v = 0.0;
      if (j >= c) {
        v = beta[static_cast<std::size_t>(k - j)];
      } else if (k > c && reach[static_cast<std::size_t>(k - c)] < 1e-17) {
        v = 0.0;
      } else {
        v = apply(rule, [&](double t) { return low_given_t(k, j, t); });
      }
      p(static_cast<Eigen::Index>(i), j) = v;
      row += v;
    }
    if (static_cast<std::size_t>(k) > trunc) {
      // Mass that would land beyond the truncation is lumped into the last state.
      const double over = beta[0];
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(trunc)) += over;
      row += over;
    }
    p(static_cast<Eigen::Index>(i), 0) = std::max(0.0, 1.0 - row);
  }

  ChainSolution out;
  out.arrival_epoch.probs = stationary(p);
  require_small_tail(out.arrival_epoch.probs);
  out.arrival_epoch.tail_mass = geometric_tail(out.arrival_epoch.probs);

  auto& pi = out.time_average.probs;
  pi.assign(n, 0.0);
  double busy = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    pi[k] = lambda * out.arrival_epoch.probs[k - 1] / (std::min<double>(static_cast<double>(k), c) * mu);
    busy += pi[k];
  }
  out.time_average.tail_mass = geometric_tail(pi);
  pi[0] = 1.0 - busy - out.time_average.tail_mass;
  return out;
}

DiscreteDist embedded_chain_mg1(double lambda, const DistributionSpec& service, std::size_t trunc) {
  if (!(lambda > 0.0)) throw DomainError("M/G/1 oracle needs lambda > 0");
  if (!(lambda * service.mean() < 1.0)) throw InstabilityError("M/G/1 oracle: rho must be below 1");
  const std::size_t n = trunc + 1;
  const Rule rule = expectation_rule(service);
  std::vector<double> alpha(n + 1, 0.0);
  double mass = 0.0;
  for (std::size_t k = 0; k <= n && mass < 1.0 - 1e-16; ++k) {
    alpha[k] = apply(rule, [&](double t) { return poisson_pmf(k, lambda * t); });
    mass += alpha[k];
  }

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = (i == 0) ? 0 : i - 1;  // lowest reachable state
    double row = 0.0;
    for (std::size_t j = base; j < n; ++j) {
      const double v = alpha[j - base];
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      row += v;
    }
    p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(trunc)) += std::max(0.0, 1.0 - row);
  }
  DiscreteDist out;
  out.probs = stationary(p);
  require_small_tail(out.probs);
  out.tail_mass = geometric_tail(out.probs);
  return out;
}

DiscreteDist birth_death_solve(const RateSchedule& birth, const RateSchedule& death, std::size_t trunc) {
  const double r_tail = birth.tail() / death.tail();
  if (!(r_tail < 1.0)) throw InstabilityError("birth-death normalizer diverges: tail birth/death ratio >= 1");
  std::vector<double> u(trunc + 1);
  u[0] = 1.0;
  for (std::size_t k = 0; k < trunc; ++k) u[k + 1] = u[k] * birth.at(k) / death.at(k);
  double tail = 0.0;
  if (trunc >= std::max(birth.head().size(), death.head().size())) tail = u[trunc] * r_tail / (1.0 - r_tail);
  double total = tail;
  for (double v : u) total += v;
  DiscreteDist out;
  out.probs.resize(u.size());
  std::transform(u.begin(), u.end(), out.probs.begin(), [total](double v) { return v / total; });
  out.tail_mass = tail / total;
  return out;
}

}  // namespace rbq::oracles

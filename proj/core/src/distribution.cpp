#include "rbq/distribution.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numeric>
#include <string>

#include "rbq/error.hpp"

namespace rbq {
namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require_positive(double x, const char* what) {
  if (!positive_finite(x)) {
    throw DomainError(std::string(what) + " must be a positive finite number, got " + std::to_string(x));
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// Taylor coefficients of r/(r+s) around center with scale h.
void add_exponential_taylor(double rate, double weight, double center, double scale, std::vector<double>& out) {
  double c = weight * rate / (rate + center);
  const double step = -scale / (rate + center);
  for (double& coeff : out) {
    coeff += c;
    c *= step;
  }
}

// B_k(b) = int_0^b (x h)^k / k! e^{-s0 x} dx for k = 0..order.
std::vector<double> truncated_moment_series(double b, double center, double scale, std::size_t order) {
  std::vector<double> out(order + 1, 0.0);
  if (b <= 0.0) return out;
  if (center == 0.0) {
    double term = b;  // h^k b^{k+1} / (k+1)!
    for (std::size_t k = 0; k <= order; ++k) {
      out[k] = term;
      term *= scale * b / static_cast<double>(k + 2);
    }
    return out;
  }
  // P(k + 1, z) by downward recurrence from the top order, which only adds
  // positive terms z^k e^-z / k!.
  const double z = center * b;
  const double ratio = scale / center;
  const double log_z = std::log(z);
  double p = boost::math::gamma_p(static_cast<double>(order + 1), z);
  for (std::size_t k = order + 1; k-- > 0;) {
    out[k] = std::pow(ratio, static_cast<double>(k)) * p / center;
    if (k > 0) {
      const double kk = static_cast<double>(k);
      p += std::exp(kk * log_z - z - std::lgamma(kk + 1.0));
    }
  }
  return out;
}

}  // namespace

DistributionSpec::DistributionSpec(Family f) : family_(std::move(f)), mean_(0.0) {
  mean_ = std::visit(
      Overloaded{
          [](const Exponential& e) { return 1.0 / e.rate; },
          [](const Deterministic& d) { return d.value; },
          [](const Erlang& e) { return e.shape / e.rate; },
          [](const HyperExponential& h) {
            double m = 0.0;
            for (std::size_t i = 0; i < h.probs.size(); ++i) m += h.probs[i] / h.rates[i];
            return m;
          },
          [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
      },
      family_);
}

DistributionSpec DistributionSpec::exponential(double rate) {
  require_positive(rate, "exponential rate");
  return DistributionSpec(Exponential{rate});
}

DistributionSpec DistributionSpec::deterministic(double value) {
  require_positive(value, "deterministic value");
  return DistributionSpec(Deterministic{value});
}

DistributionSpec DistributionSpec::erlang(int shape, double rate) {
  if (shape < 1) throw DomainError("erlang shape must be a positive integer, got " + std::to_string(shape));
  require_positive(rate, "erlang rate");
  return DistributionSpec(Erlang{shape, rate});
}

DistributionSpec DistributionSpec::hyperexponential(std::vector<double> probs, std::vector<double> rates) {
  if (probs.empty() || probs.size() != rates.size()) {
    throw DomainError("hyperexponential needs matching, nonempty probs and rates");
  }
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw DomainError("hyperexponential probabilities must be nonnegative");
  }
  for (double r : rates) require_positive(r, "hyperexponential rate");
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("hyperexponential probabilities sum to " + std::to_string(total) + ", expected 1");
  }
  return DistributionSpec(HyperExponential{std::move(probs), std::move(rates)});
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || !(lo < hi)) {
    throw DomainError("uniform requires 0 <= lo < hi");
  }
  return DistributionSpec(Uniform{lo, hi});
}

std::string_view DistributionSpec::family_name() const noexcept {
  return std::visit(Overloaded{
                        [](const Exponential&) { return std::string_view("exponential"); },
                        [](const Deterministic&) { return std::string_view("deterministic"); },
                        [](const Erlang&) { return std::string_view("erlang"); },
                        [](const HyperExponential&) { return std::string_view("hyperexponential"); },
                        [](const Uniform&) { return std::string_view("uniform"); },
                    },
                    family_);
}

double DistributionSpec::lst(double s) const {
  if (!(s >= 0.0)) throw DomainError("LST argument must be nonnegative");
  return std::visit(Overloaded{
                        [s](const Exponential& e) { return e.rate / (e.rate + s); },
                        [s](const Deterministic& d) { return std::exp(-s * d.value); },
                        [s](const Erlang& e) { return std::pow(e.rate / (e.rate + s), e.shape); },
                        [s](const HyperExponential& h) {
                          double v = 0.0;
                          for (std::size_t i = 0; i < h.probs.size(); ++i) v += h.probs[i] * h.rates[i] / (h.rates[i] + s);
                          return v;
                        },
                        [s](const Uniform& u) {
                          const double x = s * (u.hi - u.lo);
                          if (x == 0.0) return 1.0;
                          return std::exp(-s * u.lo) * (-std::expm1(-x)) / x;
                        },
                    },
                    family_);
}

std::vector<double> DistributionSpec::lst_taylor(double center, double scale, std::size_t order) const {
  if (!(center >= 0.0)) throw DomainError("LST expansion point must be nonnegative");
  std::vector<double> out(order + 1, 0.0);
  std::visit(Overloaded{
                 [&](const Exponential& e) { add_exponential_taylor(e.rate, 1.0, center, scale, out); },
                 [&](const Deterministic& d) {
                   double c = std::exp(-center * d.value);
                   for (std::size_t k = 0; k <= order; ++k) {
                     out[k] = c;
                     c *= -d.value * scale / static_cast<double>(k + 1);
                   }
                 },
                 [&](const Erlang& e) {
                   double c = std::pow(e.rate / (e.rate + center), e.shape);
                   const double step = -scale / (e.rate + center);
                   for (std::size_t k = 0; k <= order; ++k) {
                     out[k] = c;
                     c *= step * static_cast<double>(e.shape + static_cast<int>(k)) / static_cast<double>(k + 1);
                   }
                 },
                 [&](const HyperExponential& h) {
                   for (std::size_t i = 0; i < h.probs.size(); ++i) {
                     add_exponential_taylor(h.rates[i], h.probs[i], center, scale, out);
                   }
                 },
                 [&](const Uniform& u) {
                   const auto upper = truncated_moment_series(u.hi, center, scale, order);
                   const auto lower = truncated_moment_series(u.lo, center, scale, order);
                   const double width = u.hi - u.lo;
                   for (std::size_t k = 0; k <= order; ++k) {
                     const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                     out[k] = sign * (upper[k] - lower[k]) / width;
                   }
                   out[0] = lst(center);
                 },
             },
             family_);
  return out;
}

double DistributionSpec::lst_derivative(double s) const { return lst_taylor(s, 1.0, 1)[1]; }

double DistributionSpec::cdf(double x) const noexcept {
  if (x < 0.0) return 0.0;
  return std::visit(Overloaded{
                        [x](const Exponential& e) { return -std::expm1(-e.rate * x); },
                        [x](const Deterministic& d) { return x >= d.value ? 1.0 : 0.0; },
                        [x](const Erlang& e) { return boost::math::gamma_p(static_cast<double>(e.shape), e.rate * x); },
                        [x](const HyperExponential& h) {
                          double v = 0.0;
                          for (std::size_t i = 0; i < h.probs.size(); ++i) v += h.probs[i] * -std::expm1(-h.rates[i] * x);
                          return v;
                        },
                        [x](const Uniform& u) {
                          if (x <= u.lo) return 0.0;
                          if (x >= u.hi) return 1.0;
                          return (x - u.lo) / (u.hi - u.lo);
                        },
                    },
                    family_);
}

double DistributionSpec::pdf(double x) const noexcept {
  if (x < 0.0) return 0.0;
  return std::visit(Overloaded{
                        [x](const Exponential& e) { return e.rate * std::exp(-e.rate * x); },
                        [](const Deterministic&) { return 0.0; },
                        [x](const Erlang& e) {
                          return e.rate * boost::math::gamma_p_derivative(static_cast<double>(e.shape), e.rate * x);
                        },
                        [x](const HyperExponential& h) {
                          double v = 0.0;
                          for (std::size_t i = 0; i < h.probs.size(); ++i) v += h.probs[i] * h.rates[i] * std::exp(-h.rates[i] * x);
                          return v;
                        },
                        [x](const Uniform& u) { return (x >= u.lo && x <= u.hi) ? 1.0 / (u.hi - u.lo) : 0.0; },
                    },
                    family_);
}

bool operator==(const DistributionSpec& a, const DistributionSpec& b) { return a.family_ == b.family_; }

}  // namespace rbq

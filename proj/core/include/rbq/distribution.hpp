#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

namespace rbq {

// Parametric nonnegative distributions with closed-form Laplace-Stieltjes
// transforms. Every constructible instance has a strictly positive mean.
class DistributionSpec {
 public:
  struct Exponential {
    double rate;
    friend bool operator==(const Exponential&, const Exponential&) = default;
  };
  struct Deterministic {
    double value;
    friend bool operator==(const Deterministic&, const Deterministic&) = default;
  };
  struct Erlang {
    int shape;
    double rate;
    friend bool operator==(const Erlang&, const Erlang&) = default;
  };
  struct HyperExponential {
    std::vector<double> probs;
    std::vector<double> rates;
    friend bool operator==(const HyperExponential&, const HyperExponential&) = default;
  };
  struct Uniform {
    double lo;
    double hi;
    friend bool operator==(const Uniform&, const Uniform&) = default;
  };
  using Family = std::variant<Exponential, Deterministic, Erlang, HyperExponential, Uniform>;

  static DistributionSpec exponential(double rate);
  static DistributionSpec deterministic(double value);
  static DistributionSpec erlang(int shape, double rate);
  static DistributionSpec hyperexponential(std::vector<double> probs, std::vector<double> rates);
  static DistributionSpec uniform(double lo, double hi);

  const Family& family() const noexcept { return family_; }
  std::string_view family_name() const noexcept;

  double mean() const noexcept { return mean_; }

  // E[exp(-sX)]. Throws DomainError for s < 0.
  double lst(double s) const;

  // Taylor coefficients of the LST around `center` in the scaled variable
  // u = (s - center) / scale: c_k = scale^k / k! * d^k/ds^k F*(center).
  std::vector<double> lst_taylor(double center, double scale, std::size_t order) const;

  double lst_derivative(double s) const;

  double cdf(double x) const noexcept;

  // Density of the absolutely continuous part; the Deterministic family has
  // none and returns 0 everywhere.
  double pdf(double x) const noexcept;

  // Draw one variate by inversion. `unit` must return doubles in (0, 1).
  template <class UnitSource>
    requires std::invocable<UnitSource&> && std::convertible_to<std::invoke_result_t<UnitSource&>, double>
  double sample(UnitSource& unit) const;

  friend bool operator==(const DistributionSpec& a, const DistributionSpec& b);

 private:
  explicit DistributionSpec(Family f);

  Family family_;
  double mean_;
};

template <class UnitSource>
  requires std::invocable<UnitSource&> && std::convertible_to<std::invoke_result_t<UnitSource&>, double>
double DistributionSpec::sample(UnitSource& unit) const {
  struct Visitor {
    UnitSource& unit;
    double operator()(const Exponential& e) const { return -std::log(unit()) / e.rate; }
    double operator()(const Deterministic& d) const { return d.value; }
    double operator()(const Erlang& e) const {
      double acc = 0.0;
      for (int i = 0; i < e.shape; ++i) acc -= std::log(unit());
      return acc / e.rate;
    }
    double operator()(const HyperExponential& h) const {
      const double pick = unit();
      double cum = 0.0;
      std::size_t branch = h.probs.size() - 1;
      for (std::size_t i = 0; i < h.probs.size(); ++i) {
        cum += h.probs[i];
        if (pick < cum) {
          branch = i;
          break;
        }
      }
      return -std::log(unit()) / h.rates[branch];
    }
    double operator()(const Uniform& u) const { return u.lo + unit() * (u.hi - u.lo); }
  };
  return std::visit(Visitor{unit}, family_);
}

}  // namespace rbq

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rbq/distribution.hpp"

namespace rbq {

namespace detail {
struct TransformNode;
}

// Immutable, shareable expression tree describing the Laplace-Stieltjes
// transform of a nonnegative random variable. Leaves are parametric
// distributions; inner nodes are the conditional-residual operator D, its
// inverse, and finite mixtures.
//
// Evaluation works on Taylor jets rather than point values: every node can
// produce the scaled Taylor coefficients of its transform around a point.
// That makes the removable singularity of D at s == lambda an ordinary
// coefficient shift, even when several D nodes with the same rate are nested.
class Transform {
 public:
  enum class Kind { Base, DOp, Mixture, Inverse };

  static Transform base(DistributionSpec dist);

  // Value at s >= 0, clamped to [0, 1]. Throws DomainError for s < 0.
  double eval(double s) const;

  // Coefficients c_k = scale^k / k! * T^(k)(center) for k = 0..order, where
  // scale = center for center > 0 and 1 at the origin.
  std::vector<double> taylor(double center, std::size_t order) const;

  // dT/ds at s.
  double derivative(double s) const;

  double mean() const noexcept;
  Kind kind() const noexcept;

  // Node accessors. Each throws std::logic_error when called on a node of
  // the wrong kind.
  const DistributionSpec& distribution() const;
  double rate() const;
  double gamma() const;
  std::span<const double> weights() const;
  std::vector<Transform> parents() const;

 private:
  friend Transform d_operator(const Transform&, double);
  friend Transform inverse_d(const Transform&, double, double);
  friend Transform mix(const std::vector<double>&, const std::vector<Transform>&);
  friend Transform affine_combination(const std::vector<double>&, const std::vector<Transform>&);

  explicit Transform(std::shared_ptr<const detail::TransformNode> node);

  std::shared_ptr<const detail::TransformNode> node_;
};

// E[exp(-sX)] for X ~ d.
double lst_eval(const DistributionSpec& d, double s);

// Transform of D_{lambda,F}: X - Y given X >= Y with Y ~ exp(lambda)
// independent of X ~ F. Throws DegenerateInputError when F*(lambda) == 1.
Transform d_operator(const Transform& f, double lambda);

// Mean of D_{lambda,F}: mean(F) / (1 - F*(lambda)) - 1/lambda.
double residual_mean(const Transform& f, double lambda);

// The unique F with D_{lambda,F} = H, given gamma = h(0), the density of H
// at zero. Throws InvalidDensityError unless 0 < gamma < inf.
Transform inverse_d(const Transform& h, double gamma, double lambda);

// Convex combination of transforms.
Transform mix(const std::vector<double>& weights, const std::vector<Transform>& parts);

// Like mix, but weights may be negative (they must still sum to one). Used
// to solve mixture identities for one of their parts; the caller is
// responsible for the result being a proper transform.
Transform affine_combination(const std::vector<double>& weights, const std::vector<Transform>& parts);

// Approximates h(0) = lim s H*(s) by Richardson extrapolation of s H*(s) at
// s = 1e6 and 2e6. Approximate: the error is O(1/s^2) for smooth densities.
double estimate_density_at_zero(const Transform& h);

}  // namespace rbq

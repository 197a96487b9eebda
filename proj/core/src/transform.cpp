#include "rbq/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <variant>
#include <stdexcept>
#include <string>

#include "rbq/error.hpp"

namespace rbq {
namespace detail {

// Target truncation error for the backward (series) form of the D operator.
constexpr double kSeriesTolerance = 1e-17;
// The backward form is used while |lambda - center| stays below this fraction
// of the convergence radius; beyond it the forward form is stable.
constexpr double kBackwardLimit = 0.9;
constexpr std::size_t kMaxExtraTerms = 4096;
constexpr double kMaxCancellation = 1e3;
constexpr double kForwardGrowth = 4.6;  // log(100)

struct TransformNode {
  TransformNode(Transform::Kind k, double m, double a, double p, double r)
      : kind(k), mean(m), anchor(a), pole(p), reach(r) {}
  virtual ~TransformNode() = default;

  // Scaled Taylor coefficients around `center`; see Transform::taylor.
  virtual std::vector<double> jet(double center, double scale, std::size_t order) const = 0;

  Transform::Kind kind;
  double mean;
  // Rate of the outermost D node, or 0. Nested D nodes sharing this rate
  // reduce to exact coefficient shifts around it.
  double anchor;
  // Magnitude of the singularity nearest the origin (all lie on the negative
  // axis); infinity for entire transforms. The Taylor radius at s is s + pole.
  double pole;
  // Right end of the bounded part of the support (0 if none).
  double reach;
};

namespace {

struct SeriesPlan {
  std::size_t terms;
  double loss;  // natural log of the worst term-to-sum magnitude ratio
};

// Terms of a Taylor series around `center` needed at distance `dist`, or
// nullopt when it converges too slowly. Rational leaves bound the terms by
// (dist / radius)^k, bounded supports by (dist reach)^k / k!; the latter
// cancel against each other when the series alternates.
std::optional<SeriesPlan> series_terms(const TransformNode& node, double center, double dist, bool alternating) {
  if (dist == 0.0) return SeriesPlan{0, 0.0};
  double n = 0.0;
  double loss = 0.0;
  if (std::isfinite(node.pole)) {
    const double ratio = dist / (center + node.pole);
    if (ratio >= kBackwardLimit) return std::nullopt;
    n = std::ceil(std::log(kSeriesTolerance) / std::log(ratio)) + 8.0;
    if (alternating) loss = std::log((1.0 + ratio) / (1.0 - ratio));
  }
  if (node.reach > 0.0) {
    n = std::max(n, std::ceil(std::exp(2.0) * dist * node.reach) + 40.0);
    if (alternating) loss = std::max(loss, 2.0 * dist * node.reach);
  }
  return SeriesPlan{static_cast<std::size_t>(std::min(n, static_cast<double>(kMaxExtraTerms))), loss};
}

struct BaseNode final : TransformNode {
  explicit BaseNode(DistributionSpec d)
      : TransformNode(Transform::Kind::Base, d.mean(), 0.0, nearest_pole(d), support_end(d)), dist(std::move(d)) {}

  static double support_end(const DistributionSpec& d) {
    const auto& f = d.family();
    if (const auto* v = std::get_if<DistributionSpec::Deterministic>(&f)) return v->value;
    if (const auto* u = std::get_if<DistributionSpec::Uniform>(&f)) return u->hi;
    return 0.0;
  }

  static double nearest_pole(const DistributionSpec& d) {
    const auto& f = d.family();
    if (const auto* e = std::get_if<DistributionSpec::Exponential>(&f)) return e->rate;
    if (const auto* e = std::get_if<DistributionSpec::Erlang>(&f)) return e->rate;
    if (const auto* h = std::get_if<DistributionSpec::HyperExponential>(&f)) {
      return *std::min_element(h->rates.begin(), h->rates.end());
    }
    return std::numeric_limits<double>::infinity();
  }

  std::vector<double> jet(double center, double scale, std::size_t order) const override {
    return dist.lst_taylor(center, scale, order);
  }

  DistributionSpec dist;
};

struct DNode final : TransformNode {
  // The factor uses the parent's computed value at 0 rather than 1, so the
  // node is exactly normalized and scale errors do not compound with depth.
  DNode(std::shared_ptr<const TransformNode> p, double lam, double p_at_zero, double p_at_lam, double m)
      : TransformNode(Transform::Kind::DOp, m, lam, p->pole, p->reach),
        parent(std::move(p)),
        lambda(lam),
        parent_at_lambda(p_at_lam),
        factor(lam / (p_at_zero - p_at_lam)) {}

  // D(s) = c (P(s) - P(lambda)) / (lambda - s). With u = (s - s0) / h and
  // x0 = (lambda - s0) / h the quotient has two coefficient forms:
  //   forward:  d_k = (c n_k / h + d_{k-1}) / x0          (exact, amplifies by 1/|x0|)
  //   backward: d_k = -(c/h) sum_{i>k} p_i x0^{i-1-k}      (series, needs |x0| < 1)
  // The backward form with x0 == 0 is the limit at the removable singularity.
  std::vector<double> jet(double center, double scale, std::size_t order) const override {
    const double a = lambda - center;
    const double x0 = a / scale;
    std::vector<double> out(order + 1);
    // The forward form loses 1/|x0| per order; past lambda + factor it also
    // contracts errors from the parent. The backward form loses only to
    // cancellation when its terms alternate.
    const double forward_loss = (a != 0.0 && std::abs(x0) < 1.0) ? static_cast<double>(order) * std::log(1.0 / std::abs(x0)) : 0.0;
    const bool contracting = a < 0.0 && -a > factor && forward_loss <= kForwardGrowth;
    auto plan = contracting ? std::nullopt : series_terms(*parent, center, std::abs(a), x0 > 0.0);
    if (plan && a != 0.0 && plan->loss > forward_loss + kForwardGrowth) plan.reset();
    if (!plan && a == 0.0) throw NumericError("no stable expansion at the D operator rate");
    if (!plan) {
      const auto p = parent->jet(center, scale, order);
      double prev = 0.0;
      for (std::size_t k = 0; k <= order; ++k) {
        const double n_k = (k == 0) ? (p[0] - parent_at_lambda) : p[k];
        prev = (factor * n_k / scale + prev) / x0;
        out[k] = prev;
      }
      return out;
    }
    const std::size_t top = order + plan->terms;  // highest k of the partial sums
    const auto p = parent->jet(center, scale, top + 1);
    double acc = p[top + 1];
    for (std::size_t k = top + 1; k-- > 0;) {
      if (k < top) acc = p[k + 1] + x0 * acc;
      if (k <= order) out[k] = -factor / scale * acc;
    }
    return out;
  }

  std::shared_ptr<const TransformNode> parent;
  double lambda;
  double parent_at_lambda;
  double factor;
};

struct MixtureNode final : TransformNode {
  MixtureNode(std::vector<double> w, std::vector<std::shared_ptr<const TransformNode>> p, double m)
      : TransformNode(Transform::Kind::Mixture, m, 0.0, std::numeric_limits<double>::infinity(), 0.0),
        weights(std::move(w)),
        parts(std::move(p)) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (weights[i] == 0.0) continue;
      pole = std::min(pole, parts[i]->pole);
      reach = std::max(reach, parts[i]->reach);
    }
    for (std::size_t i = 0; i < parts.size() && anchor == 0.0; ++i) {
      if (weights[i] != 0.0) anchor = parts[i]->anchor;
    }
  }

  std::vector<double> jet(double center, double scale, std::size_t order) const override {
    std::vector<double> out(order + 1, 0.0);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (weights[i] == 0.0) continue;
      const auto p = parts[i]->jet(center, scale, order);
      for (std::size_t k = 0; k <= order; ++k) out[k] += weights[i] * p[k];
    }
    return out;
  }

  std::vector<double> weights;
  std::vector<std::shared_ptr<const TransformNode>> parts;
};

// F(s) = [H(s) (lambda - s) + gamma] / (lambda + gamma).
struct InverseNode final : TransformNode {
  InverseNode(std::shared_ptr<const TransformNode> h, double g, double lam, double m)
      : TransformNode(Transform::Kind::Inverse, m, lam, h->pole, h->reach), parent(std::move(h)), gamma(g), lambda(lam) {}

  std::vector<double> jet(double center, double scale, std::size_t order) const override {
    const auto h = parent->jet(center, scale, order);
    const double a = lambda - center;
    const double denom = lambda + gamma;
    std::vector<double> out(order + 1);
    for (std::size_t k = 0; k <= order; ++k) {
      const double prev = (k == 0) ? 0.0 : h[k - 1];
      out[k] = (h[k] * a - scale * prev) / denom;
    }
    out[0] += gamma / denom;
    return out;
  }

  std::shared_ptr<const TransformNode> parent;
  double gamma;
  double lambda;
};

double scale_for(double center) { return center > 0.0 ? center : 1.0; }

double direct_value(const TransformNode& node, double s) { return node.jet(s, scale_for(s), 0)[0]; }

// Sums the Taylor series around the anchor. For s < anchor every term is
// positive; above it the series alternates and is rejected when it stops
// converging or cancels too much, in which case the direct form is used.
double value_at(const TransformNode& node, double s) {
  const double c = node.anchor;
  if (!(c > 0.0)) return direct_value(node, s);
  if (s == c) return node.jet(c, c, 0)[0];
  const auto plan = series_terms(node, c, std::abs(s - c), s > c);
  if (!plan || plan->loss > std::log(kMaxCancellation)) return direct_value(node, s);
  const double u = (s - c) / c;
  const auto d = node.jet(c, c, std::max<std::size_t>(plan->terms, 8));
  double sum = 0.0;
  double magnitude = 0.0;
  double tail = 0.0;
  double power = 1.0;
  const std::size_t tail_start = d.size() - d.size() / 4;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double term = d[k] * power;
    sum += term;
    magnitude += std::abs(term);
    if (k >= tail_start) tail = std::max(tail, std::abs(term));
    power *= u;
  }
  // High-order coefficients can lose accuracy; a tail that has not died out means the sum is garbage.
  const bool converged = tail <= 1e-14 * magnitude;
  const bool in_range = sum >= -1e-12 && sum <= 1.0 + 1e-12;
  if (std::isfinite(magnitude) && converged && in_range && magnitude <= kMaxCancellation * std::abs(sum)) return sum;
  return direct_value(node, s);
}

void require_rate(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw DomainError("rate must be a positive finite number, got " + std::to_string(lambda));
  }
}

}  // namespace
}  // namespace detail

Transform::Transform(std::shared_ptr<const detail::TransformNode> node) : node_(std::move(node)) {}

Transform Transform::base(DistributionSpec dist) {
  return Transform(std::make_shared<const detail::BaseNode>(std::move(dist)));
}

double Transform::eval(double s) const {
  if (!(s >= 0.0)) throw DomainError("transform argument must be nonnegative");
  return std::clamp(detail::value_at(*node_, s), 0.0, 1.0);
}

std::vector<double> Transform::taylor(double center, std::size_t order) const {
  if (!(center >= 0.0)) throw DomainError("expansion point must be nonnegative");
  return node_->jet(center, detail::scale_for(center), order);
}

double Transform::derivative(double s) const {
  const double h = detail::scale_for(s);
  return taylor(s, 1)[1] / h;
}

double Transform::mean() const noexcept { return node_->mean; }

Transform::Kind Transform::kind() const noexcept { return node_->kind; }

const DistributionSpec& Transform::distribution() const {
  if (kind() != Kind::Base) throw std::logic_error("distribution() on a non-base transform");
  return static_cast<const detail::BaseNode&>(*node_).dist;
}

double Transform::rate() const {
  if (kind() == Kind::DOp) return static_cast<const detail::DNode&>(*node_).lambda;
  if (kind() == Kind::Inverse) return static_cast<const detail::InverseNode&>(*node_).lambda;
  throw std::logic_error("rate() on a transform without a rate");
}

double Transform::gamma() const {
  if (kind() != Kind::Inverse) throw std::logic_error("gamma() on a non-inverse transform");
  return static_cast<const detail::InverseNode&>(*node_).gamma;
}

std::span<const double> Transform::weights() const {
  if (kind() != Kind::Mixture) throw std::logic_error("weights() on a non-mixture transform");
  return static_cast<const detail::MixtureNode&>(*node_).weights;
}

std::vector<Transform> Transform::parents() const {
  switch (kind()) {
    case Kind::Base:
      return {};
    case Kind::DOp:
      return {Transform(static_cast<const detail::DNode&>(*node_).parent)};
    case Kind::Inverse:
      return {Transform(static_cast<const detail::InverseNode&>(*node_).parent)};
    case Kind::Mixture: {
      std::vector<Transform> out;
      for (const auto& p : static_cast<const detail::MixtureNode&>(*node_).parts) out.push_back(Transform(p));
      return out;
    }
  }
  return {};
}

double lst_eval(const DistributionSpec& d, double s) { return d.lst(s); }

Transform d_operator(const Transform& f, double lambda) {
  detail::require_rate(lambda);
  const double at_lambda = detail::value_at(*f.node_, lambda);
  const double at_zero = detail::value_at(*f.node_, 0.0);
  if (at_zero - at_lambda <= 1e-12) {
    throw DegenerateInputError("D operator undefined: F*(lambda) = 1, so X < Y_lambda almost surely");
  }
  const double m = f.mean() / (1.0 - at_lambda) - 1.0 / lambda;
  return Transform(std::make_shared<const detail::DNode>(f.node_, lambda, at_zero, at_lambda, m));
}

double residual_mean(const Transform& f, double lambda) { return d_operator(f, lambda).mean(); }

Transform inverse_d(const Transform& h, double gamma, double lambda) {
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    throw InvalidDensityError("inverse D operator needs a density at zero in (0, inf), got " + std::to_string(gamma));
  }
  detail::require_rate(lambda);
  if (std::abs(detail::value_at(*h.node_, 0.0) - 1.0) > 1e-10) {
    throw DomainError("inverse D operator needs a proper transform with H*(0) = 1");
  }
  const double m = (lambda * h.mean() + 1.0) / (lambda + gamma);
  return Transform(std::make_shared<const detail::InverseNode>(h.node_, gamma, lambda, m));
}

namespace {

void check_weights(const std::vector<double>& weights, std::size_t parts, bool allow_negative) {
  if (weights.empty() || weights.size() != parts) {
    throw DomainError("mixture needs matching, nonempty weight and part lists");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || (!allow_negative && w < 0.0)) throw DomainError("mixture weights must be nonnegative");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("mixture weights sum to " + std::to_string(total) + ", expected 1");
  }
}

}  // namespace

Transform mix(const std::vector<double>& weights, const std::vector<Transform>& parts) {
  check_weights(weights, parts.size(), false);
  std::vector<std::shared_ptr<const detail::TransformNode>> nodes;
  nodes.reserve(parts.size());
  double m = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    nodes.push_back(parts[i].node_);
    m += weights[i] * parts[i].mean();
  }
  return Transform(std::make_shared<const detail::MixtureNode>(weights, std::move(nodes), m));
}

Transform affine_combination(const std::vector<double>& weights, const std::vector<Transform>& parts) {
  check_weights(weights, parts.size(), true);
  std::vector<std::shared_ptr<const detail::TransformNode>> nodes;
  double m = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    nodes.push_back(parts[i].node_);
    m += weights[i] * parts[i].mean();
  }
  return Transform(std::make_shared<const detail::MixtureNode>(weights, std::move(nodes), m));
}

double estimate_density_at_zero(const Transform& h) {
  constexpr double s = 1e6;
  const double g1 = s * h.eval(s);
  const double g2 = 2.0 * s * h.eval(2.0 * s);
  return 2.0 * g2 - g1;
}

}  // namespace rbq

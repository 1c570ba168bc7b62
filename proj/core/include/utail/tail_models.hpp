// tail_models.hpp
//
// Catalog of heavy-tailed distribution models. Each model carries
//   - a tail function J with P(|X| > t) <= exp(-J(t)), J nonnegative and
//     non-decreasing, together with its generalized inverse and the shift b
//     such that J(t1) + J(t2) + b >= J(t1 + t2),
//   - exact survival functions (linear and log scale),
//   - an inverse-CDF sampler driven by one or two uniforms per draw
//     (fixed count per family, so streams are reproducible),
//   - absolute moments E|X|^r used by the kernel moment tables,
//   - an optional subWeibull envelope (alpha, c) with
//     c * t^(1/alpha) <= -log P(|X| > t) for all t > 0.
//
// Serialized as structured text: family name plus named parameters, e.g.
// weibull{scale=1.0,shape=0.5}; the symmetrized variant wraps a base model
// as signed{weibull{scale=1.0,shape=0.5}}.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "utail/rng.hpp"

namespace utail {

enum class ModelFamily {
  exponential,
  weibull,
  pareto,
  lognormal,
  loglogistic,
  absnormalpower,
};

struct SubweibullParams {
  double alpha = 0.0;  // J(t) effectively >= c * t^(1/alpha)
  double c = 0.0;
};

class DistributionModel {
 public:
  // Factory helpers validate parameter domains.
  static DistributionModel exponential(double rate);
  static DistributionModel weibull(double scale, double shape);
  static DistributionModel pareto(double xm, double alpha);
  static DistributionModel lognormal();
  static DistributionModel loglogistic(double scale, double shape);
  static DistributionModel absnormalpower(double a);
  // Symmetrized variant of a positive base model (Rademacher sign).
  static DistributionModel make_signed(DistributionModel base);

  static DistributionModel parse(std::string_view token);
  std::string token() const;
  std::string describe() const;

  ModelFamily family() const { return family_; }
  bool is_signed() const { return signed_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }

  // Tail function J (clamped at zero, non-decreasing) and friends.
  double j_value(double t) const;
  // Generalized inverse: inf{t >= 0 : J(t) >= y}; +inf if unreachable in
  // double precision.
  double j_inverse(double y) const;
  // Shift b with J(t1) + J(t2) + b >= J(t1 + t2) on the positive axis.
  double subadditivity_shift() const;

  // Exact survival of |X| and one-sided tails of X.
  double true_tail(double t) const;      // P(|X| > t), t >= 0
  double log_true_tail(double t) const;  // log P(|X| > t)
  double right_tail(double t) const;     // P(X > t), t >= 0
  double log_right_tail(double t) const;
  double left_tail(double s) const;  // P(X <= -s), s >= 0

  // Quantile transform; u in [0, 1). Signed models consume a second uniform
  // inside sample() for the Rademacher sign.
  double quantile(double u) const;
  double sample(RngStream& stream) const;

  // E|X|^r for r in {1,2,3,4}; +inf when the moment diverges.
  double abs_moment(int r) const;
  double mean() const;  // EX; zero for signed variants
  double variance() const;

  std::optional<SubweibullParams> subweibull_params() const;
  // Polynomial tail exponent gamma with J(t) >= gamma log t for large t
  // (Pareto, LogLogistic); nullopt for super-polynomial families.
  std::optional<double> polynomial_gamma() const;

  // Largest J-scale value y such that j_inverse(y) stays representable;
  // used to cap diagnostic grids for slowly growing tails.
  double max_j_scale() const;

 private:
  DistributionModel(ModelFamily f, double p1, double p2)
      : family_(f), p1_(p1), p2_(p2) {}

  double j_raw(double t) const;  // before the max(0, .) clamp

  ModelFamily family_;
  double p1_ = 0.0;
  double p2_ = 0.0;
  bool signed_ = false;
};

// The distribution of |X|: the model itself when its support is
// nonnegative, the unsigned base otherwise.
DistributionModel magnitude_model(const DistributionModel& model);

// Token patterns for `utail catalog`.
struct ModelCatalogEntry {
  std::string pattern;
  std::string description;
};
const std::vector<ModelCatalogEntry>& model_catalog();

}  // namespace utail

// kernels.hpp
//
// Kernel catalog for U-statistics over the distribution models:
//   absdiff  h(x,y) = |x - y| - c
//   sqdiff   h(x,y) = (x - y)^2 - c
//   maxabs   h(x1..xm) = max|xi| - c          (order m configurable)
//   omegasq  h(x,y) = (x^2 + y^2)/2 - max(x,y) - c
//   product  h(x,y) = x*y - c
//   identity h(x) = x - c
// Centering c defaults to 0 and is the raw-kernel mean under a model when
// bound via centering_constant. Each kernel has a fast exact U-statistic
// path, a literal brute-force path, the one-argument minorant phi with its
// exact tail, and a conservative tail function I for the centered kernel
// with an optional subWeibull envelope (alpha, c_env).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "utail/rng.hpp"
#include "utail/tail_models.hpp"

namespace utail {

enum class KernelFamily { absdiff, sqdiff, maxabs, omegasq, product, identity };

struct KernelSpec {
  KernelFamily family = KernelFamily::identity;
  int order = 1;          // m
  double centering = 0.0; // c

  static KernelSpec absdiff(double c = 0.0);
  static KernelSpec sqdiff(double c = 0.0);
  static KernelSpec maxabs(int m = 2, double c = 0.0);
  static KernelSpec omegasq(double c = 0.0);
  static KernelSpec product(double c = 0.0);
  static KernelSpec identity(double c = 0.0);

  KernelSpec with_centering(double c) const {
    KernelSpec k = *this;
    k.centering = c;
    return k;
  }

  static KernelSpec parse(std::string_view token);  // centering not encoded
  std::string token() const;
  std::string describe() const;
};

struct KernelCatalogEntry {
  std::string pattern;
  std::string description;
};
const std::vector<KernelCatalogEntry>& kernel_catalog();

// h(args) including centering; arity error unless args.size() == order.
double eval_kernel(const KernelSpec& kernel, const std::vector<double>& args);

// Exact U-statistic via the family's fast path; mutates a copy of the
// sample. Size error if n < m.
double u_statistic(const KernelSpec& kernel, std::vector<double> sample);

// Literal average over all C(n, m) subsets; guard C(n, m) <= 1e6.
double u_statistic_bruteforce(const KernelSpec& kernel,
                              const std::vector<double>& sample);

// Reusable evaluator for Monte Carlo loops: precomputes order-statistic
// weights once per (kernel, n). eval() sorts the scratch buffer in place.
class UStatEvaluator {
 public:
  UStatEvaluator(const KernelSpec& kernel, std::size_t n);
  double eval(std::vector<double>& sample) const;
  std::size_t sample_size() const { return n_; }

 private:
  KernelSpec kernel_;
  std::size_t n_;
  std::vector<double> weights_;  // maxabs order-statistic weights
};

// Centering constant c = E[h_raw] under the model.
struct CenteringResult {
  double value = 0.0;
  double standard_error = 0.0;  // 0 for closed-form/quadrature results
};
CenteringResult centering_constant(const KernelSpec& kernel,
                                   const DistributionModel& model);
// Spec'd Monte Carlo fallback, kept as a cross-check: mean of `reps`
// independent raw-kernel draws with its standard error.
CenteringResult centering_constant_mc(const KernelSpec& kernel,
                                      const DistributionModel& model,
                                      std::uint64_t reps, RngStream& stream);

// E[h^2] of the centered kernel; +inf when the driving moment diverges.
double kernel_second_moment(const KernelSpec& kernel,
                            const DistributionModel& model);

// One-argument minorant phi_n and its exact tail P(phi_n(X) >= (n/m) t),
// with R = j_inverse(log 2n). Supported kernels: absdiff, sqdiff, maxabs,
// omegasq (omegasq needs R >= 1).
double phi_value(const KernelSpec& kernel, const DistributionModel& model,
                 std::size_t n, double x);
double phi_tail(const KernelSpec& kernel, const DistributionModel& model,
                std::size_t n, double t);
double log_phi_tail(const KernelSpec& kernel, const DistributionModel& model,
                    std::size_t n, double t);

// Conservative tail function for the centered kernel:
// P(h > u) <= exp(-I(u)), I nonnegative and non-decreasing, built from the
// model's J by union and layering arguments and validated empirically by the
// test battery. Exposes the subWeibull envelope (alpha, c_env) with
// c_env * u^(1/alpha) effectively below -log P(h > u).
class KernelTail {
 public:
  KernelTail(const KernelSpec& kernel, const DistributionModel& model);

  double I(double u) const;
  // Smallest u in the scan with I(u) > 0 (0 if I is positive at the origin).
  double positivity_threshold() const { return first_positive_; }

  bool subweibull_available() const { return envelope_.has_value(); }
  SubweibullParams envelope() const;

  const KernelSpec& kernel() const { return kernel_; }
  const DistributionModel& model() const { return model_; }

 private:
  double raw_I(double u) const;  // max over active forms, before clamp

  KernelSpec kernel_;
  DistributionModel model_;
  double b_ = 0.0;
  double layer_activation_ = 0.0;  // layered difference form active beyond this
  double first_positive_ = 0.0;
  std::optional<SubweibullParams> envelope_;
};

KernelTail kernel_tail_I(const KernelSpec& kernel,
                         const DistributionModel& model);

}  // namespace utail

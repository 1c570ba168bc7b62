// bounds.hpp
//
// Finite-sample upper bound for P(U_n > t) with three summands: a Gaussian
// term exp(-k t^2 / (2 v)), an intermediate term exp(-beta I(kt) max(1/2,
// c_factor)), and a union term C(n,m) exp(-I(kt)), where k = floor(n/m) and
// I is the kernel tail function. v is the truncated exponential second
// moment v(L, eta) = E[h_L^2 1(h<=0) + h_L^2 e^{eta h_L} 1(h>0)] at L = kt,
// eta = beta I(kt)/(kt), resolved by Monte Carlo or by closed caps.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "utail/kernels.hpp"
#include "utail/tail_models.hpp"

namespace utail {

struct EstimateResult {
  double value = 0.0;
  double standard_error = 0.0;
};

// Monte Carlo estimate of v(L, eta) for the centered kernel.
// Preconditions: reps >= 1e5, eta >= 0, L >= 0, eta * L within the exp
// guard (regime error otherwise).
EstimateResult estimate_v(const KernelSpec& kernel,
                          const DistributionModel& model, double L,
                          double eta, std::uint64_t reps,
                          std::uint64_t master_seed,
                          std::string_view stream_id);

// Closed cap on v(L, eta) valid for every L when the kernel tail admits a
// subWeibull envelope I(u) >= c u^{1/alpha} with alpha >= 1 and
// eta <= beta I(L)/L, beta in [0, 1):
//   second_moment + Gamma(2a+1)/((1-b)c)^{2a} + b c Gamma(3a+1)/(3 ((1-b)c)^{3a}).
double subweibull_v_cap(double alpha, double c, double beta,
                        double second_moment);

// Cap scale_c * L^{2-(1-beta)*gamma} * log L for polynomially tailed
// kernels; needs gamma > 1, beta < 1 - 1/gamma, L > 1.
double polynomial_v_cap(double scale_c, double gamma, double beta, double L);

// Effective polynomial tail exponent of the centered kernel under the
// model (the model's gamma, halved for kernels quadratic in the sample);
// domain error when the model has no polynomial tail exponent.
double kernel_polynomial_gamma(const KernelSpec& kernel,
                               const DistributionModel& model);

// Monte Carlo calibration of scale_c: maximizes estimate_v / shape over a
// geometric L grid and adds 25% headroom.
double calibrate_polynomial_v_scale(const KernelSpec& kernel,
                                    const DistributionModel& model,
                                    double beta, std::uint64_t reps,
                                    std::uint64_t master_seed);

// 1 - (beta/(2t)) (I(kt)/(kt)) v, the factor sharpening the intermediate
// exponent; the bound uses max(1/2, c_factor).
double c_factor(double t, double beta, std::uint64_t k, double i_kt,
                double v);

struct BoundBreakdown {
  std::size_t n = 0;
  int m = 0;
  std::uint64_t k = 0;
  double t = 0.0;
  double beta = 0.0;
  double v_used = 0.0;
  double c_factor = 0.0;
  double log_gaussian = 0.0;
  double log_intermediate = 0.0;
  double log_union = 0.0;
  double gaussian = 0.0;
  double intermediate = 0.0;
  double union_term = 0.0;
  double log_total = 0.0;  // before the clamp at 1
  double total = 0.0;      // min(1, sum of the three terms)
  std::string region;      // largest summand: gaussian | intermediate | union
};

// Preconditions: n >= kernel order, t > 0, beta in (0, 1], v > 0 finite.
BoundBreakdown evaluate_upper_bound(const KernelTail& tail, std::size_t n,
                                    double t, double beta, double v);

enum class VMode { automatic, subweibull_cap, polynomial_cap, mc_estimate, fixed };

struct VChoice {
  VMode mode = VMode::automatic;
  double fixed_value = 0.0;          // for VMode::fixed
  std::uint64_t reps = 1000000;      // for Monte Carlo paths
};

struct ResolvedV {
  double value = 0.0;
  double standard_error = 0.0;  // Monte Carlo paths only
  VMode used = VMode::fixed;
  std::string detail;  // human-readable note on the route taken
};

// Picks v for the bound at (n, t, beta): the subWeibull cap when the tail
// exposes an envelope, otherwise a Monte Carlo estimate (automatic mode),
// or the explicitly requested route.
ResolvedV resolve_v(const KernelTail& tail, std::size_t n, double t,
                    double beta, const VChoice& choice,
                    std::uint64_t master_seed);

// Deviation scale t* ~ k^{-(alpha-1)/(2alpha-1)} separating the Gaussian
// regime from the intermediate one for a subWeibull envelope exponent
// alpha >= 1 (domain error below 1).
double classify_gaussian_boundary(double alpha, std::uint64_t k);

// Monte Carlo check of the chain
//   E e^{lambda U_n(h_L)} <= (E e^{(lambda/k) h_L})^k <= e^{k (lambda/k)^2 v / 2}
// for the truncated kernel h_L = h 1(h <= L). Both gaps should be
// nonnegative up to Monte Carlo error. Brute-force U path: needs n <= 30.
struct MgfChainResult {
  double ustat_mgf = 1.0;          // E e^{lambda U_n(h_L)}
  double per_draw_mgf_pow_k = 1.0; // (E e^{(lambda/k) h_L})^k
  double gaussian_dominating = 1.0;  // e^{k eta^2 v / 2}
  double v_estimate = 0.0;
  double gap_chain = 0.0;  // per_draw_mgf_pow_k - ustat_mgf
  double gap_chain_se = 0.0;
  double gap_gaussian = 0.0;  // gaussian_dominating - per_draw_mgf_pow_k
  double gap_gaussian_se = 0.0;
};
MgfChainResult mgf_chain_check(const KernelSpec& kernel,
                               const DistributionModel& model, std::size_t n,
                               double lambda, double L, std::uint64_t reps,
                               std::uint64_t master_seed,
                               std::string_view stream_id);

}  // namespace utail

// ldp.hpp
//
// Large-deviation diagnostics around the upper bound: the minorant-based
// lower bound prefactor * phi_tail, a ratio scan of -log p_hat against
// I(kt) across sample sizes, an assumption check battery with independent
// quadrature oracles, and the mean-square decomposition bound that beats
// the direct product-kernel bound.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "utail/bounds.hpp"
#include "utail/kernels.hpp"
#include "utail/tail_models.hpp"

namespace utail {

struct LowerBoundResult {
  double value = 0.0;
  double log_value = 0.0;
  bool small_n_warning = false;  // n below the prefactor's calibrated range
};

// prefactor * P(phi_n(X) >= (n/m) t); the prefactor (default 0.09) is the
// calibrated constant making this a valid lower bound for P(U_n > t) at
// n >= 20 (smaller n sets the warning flag, the value is still returned).
LowerBoundResult lower_bound(const KernelSpec& kernel,
                             const DistributionModel& model, std::size_t n,
                             double t, double prefactor = 0.09);

struct LdpScanOptions {
  double beta = 0.9;
  VChoice v;
  std::uint64_t replications = 100000;        // initial Monte Carlo budget
  std::uint64_t max_replications = 12800000;  // doubling cap
  double ci_level = 0.99;
  double lower_prefactor = 0.09;
  std::uint64_t master_seed = 12345;
  std::string stream_prefix = "ldp";
  int threads = 1;
};

struct LdpScanRow {
  std::size_t n = 0;
  std::uint64_t k = 0;
  double t = 0.0;
  double i_kt = 0.0;
  std::uint64_t exceedances = 0;
  std::uint64_t trials = 0;
  double p_hat = 0.0;
  double neg_log_phat = 0.0;
  double ratio = 0.0;  // -log p_hat / I(kt)
  double lower_bound = 0.0;
  double bound_total = 0.0;
  bool censored = false;  // fewer than 100 exceedances at the budget cap
};

// One row per n: the Monte Carlo budget doubles until the row holds at
// least 100 exceedances or hits max_replications (then censored = true).
std::vector<LdpScanRow> ldp_ratio_scan(const KernelSpec& kernel,
                                       const DistributionModel& model,
                                       const std::vector<std::size_t>& ns,
                                       double t, const LdpScanOptions& opts);

// Independent oracle for log P(h > u): exact closed forms where available
// (maxabs, identity) and high-order log-space quadrature otherwise.
// Unsupported for omegasq on signed models.
double log_kernel_tail_oracle(const KernelSpec& kernel,
                              const DistributionModel& model, double u);

struct AssumptionCheck {
  std::string name;
  bool ok = false;
  std::string evidence;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_ok() const;
  const AssumptionCheck* find(std::string_view name) const;
};

// Checks, in order: centered (E[h] matches the centering), model_tail_valid
// (J never exceeds -log P(|X| > t)), kernel_tail_valid (I never exceeds
// -log P(h > u), via the oracle), subweibull_envelope (fitted stretch
// exponent strictly above 1 and an envelope present), deviation_zone
// (k t^2 >= I(kt)), superlog_growth (J(t)/log t grows and ends >= 10),
// subadditive (J(x+y) <= J(x)+J(y)+b on a 100x100 grid).
AssumptionReport check_assumptions(const KernelSpec& kernel,
                                   const DistributionModel& model,
                                   std::size_t n, double t);

// U-statistic of the product kernel from the sample mean and sum of
// squares: U = n/(n-1) mean^2 - sum_squares/(n(n-1)).
struct ProductMoments {
  double u_stat = 0.0;
  double mean = 0.0;
  double sum_squares = 0.0;
};
ProductMoments product_identity(const std::vector<double>& sample);

// Compares the direct product-kernel bound ("naive") with the mean-square
// decomposition: U <= n/(n-1) mean^2, so P(U > t) <= P(|mean| > sqrt(t/2)),
// bounded by the m = 1 machinery with tail I2(u) = max(0, J(u) - log 2)
// and k = n. Needs a symmetric (signed) model. Sums are reported raw
// (pre-clamp) so the comparison stays informative when both exceed 1.
struct ProductTailComparison {
  double t_eff = 0.0;  // sqrt(t/2)
  double i2 = 0.0;     // I2 at n * t_eff
  double v_composite = 0.0;
  double composite_gaussian = 0.0;
  double composite_intermediate = 0.0;
  double composite_union = 0.0;
  double composite_sum = 0.0;  // raw
  double naive_sum = 0.0;      // raw
  BoundBreakdown naive;
};
ProductTailComparison product_tail_bound(const DistributionModel& model,
                                         std::size_t n, double t, double beta,
                                         const VChoice& v,
                                         std::uint64_t master_seed);

}  // namespace utail

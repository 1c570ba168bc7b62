// mc_engine.hpp
//
// Monte Carlo estimation of P(U_n > t). Replicate r of a named run draws
// from its own counter-derived stream, so estimates are byte-identical for
// a fixed master seed regardless of thread count or scheduling. Exceedance
// counts are integers (order-free to merge); intervals are Clopper-Pearson.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "utail/kernels.hpp"
#include "utail/tail_models.hpp"

namespace utail {

// Exact (Clopper-Pearson) two-sided binomial interval at confidence `level`.
struct BinomialInterval {
  double lower = 0.0;
  double upper = 1.0;
};
BinomialInterval clopper_pearson(std::uint64_t exceedances,
                                 std::uint64_t trials, double level);

struct TailPoint {
  double t = 0.0;
  std::uint64_t exceedances = 0;
  std::uint64_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
};

struct McOptions {
  std::uint64_t replications = 100000;  // >= 1000
  double ci_level = 0.99;
  std::uint64_t master_seed = 12345;
  std::string stream_id = "tail";  // names the replicate stream family
  int threads = 1;
};

// One shared pass of `replications` U-statistic draws evaluated against the
// whole grid (points are dependent across t, independent across replicates).
std::vector<TailPoint> run_tail_estimation(const KernelSpec& kernel,
                                           const DistributionModel& model,
                                           std::size_t n,
                                           const std::vector<double>& t_grid,
                                           const McOptions& opts);

// Pilot-run grid builder: `points` thresholds with pilot exceedance
// probabilities geometrically spaced in [p_lo, p_hi]. The high end is
// clipped below the pilot estimate of P(U > 0) so every threshold is a
// positive deviation; regime error when that leaves no room above p_lo.
std::vector<double> make_quantile_grid(const KernelSpec& kernel,
                                       const DistributionModel& model,
                                       std::size_t n, std::size_t points,
                                       double p_lo, double p_hi,
                                       const McOptions& opts);

}  // namespace utail

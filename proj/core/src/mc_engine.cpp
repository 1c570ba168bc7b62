// mc_engine.cpp

#include "utail/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "utail/errors.hpp"
#include "utail/rng.hpp"

namespace utail {

namespace {

constexpr std::uint64_t kBatch = 4096;

void check_options(const McOptions& opts) {
  if (opts.replications < 1000) {
    throw_domain("Monte Carlo needs replications >= 1000");
  }
  if (!(opts.ci_level > 0.0 && opts.ci_level < 1.0)) {
    throw_domain("confidence level must be in (0, 1)");
  }
  if (opts.threads < 1) throw_domain("threads must be >= 1");
}

// Runs `visit(replicate, u_value)` over all replicates, batched. The visitor
// must be thread-safe; replicate streams make results scheduling-invariant.
template <typename Visit>
void for_each_u(const KernelSpec& kernel, const DistributionModel& model,
                std::size_t n, const McOptions& opts, Visit visit) {
  const UStatEvaluator evaluator(kernel, n);
  const std::uint64_t reps = opts.replications;
  const std::uint64_t batches = (reps + kBatch - 1) / kBatch;
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    std::vector<double> sample(n);
    while (true) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= batches) break;
      const std::uint64_t lo = b * kBatch;
      const std::uint64_t hi = std::min(reps, lo + kBatch);
      for (std::uint64_t r = lo; r < hi; ++r) {
        RngStream stream = derive_stream(opts.master_seed, opts.stream_id, r);
        for (double& x : sample) x = model.sample(stream);
        visit(r, evaluator.eval(sample));
      }
    }
  };
  const int workers = static_cast<int>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(opts.threads),
                              batches));
  if (workers <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

BinomialInterval clopper_pearson(std::uint64_t exceedances,
                                 std::uint64_t trials, double level) {
  if (trials == 0) throw_domain("clopper_pearson needs trials >= 1");
  if (exceedances > trials) {
    throw_domain("clopper_pearson needs exceedances <= trials");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw_domain("confidence level must be in (0, 1)");
  }
  const double alpha = 1.0 - level;
  const double k = static_cast<double>(exceedances);
  const double n = static_cast<double>(trials);
  BinomialInterval out;
  out.lower = exceedances == 0
                  ? 0.0
                  : boost::math::ibeta_inv(k, n - k + 1.0, 0.5 * alpha);
  out.upper = exceedances == trials
                  ? 1.0
                  : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - 0.5 * alpha);
  return out;
}

std::vector<TailPoint> run_tail_estimation(const KernelSpec& kernel,
                                           const DistributionModel& model,
                                           std::size_t n,
                                           const std::vector<double>& t_grid,
                                           const McOptions& opts) {
  check_options(opts);
  std::vector<std::atomic<std::uint64_t>> counts(t_grid.size());
  for (auto& c : counts) c.store(0);
  for_each_u(kernel, model, n, opts, [&](std::uint64_t, double u) {
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      if (u > t_grid[j]) counts[j].fetch_add(1, std::memory_order_relaxed);
    }
  });
  std::vector<TailPoint> out(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    TailPoint& p = out[j];
    p.t = t_grid[j];
    p.exceedances = counts[j].load();
    p.trials = opts.replications;
    p.p_hat = static_cast<double>(p.exceedances) /
              static_cast<double>(p.trials);
    auto ci = clopper_pearson(p.exceedances, p.trials, opts.ci_level);
    p.ci_low = ci.lower;
    p.ci_high = ci.upper;
  }
  return out;
}

std::vector<double> make_quantile_grid(const KernelSpec& kernel,
                                       const DistributionModel& model,
                                       std::size_t n, std::size_t points,
                                       double p_lo, double p_hi,
                                       const McOptions& opts) {
  check_options(opts);
  if (points < 2) throw_domain("quantile grid needs at least 2 points");
  if (!(p_lo > 0.0 && p_lo < p_hi && p_hi < 1.0)) {
    throw_domain("quantile grid needs 0 < p_lo < p_hi < 1");
  }
  const std::uint64_t reps = opts.replications;
  if (static_cast<double>(reps) * p_lo < 10.0) {
    throw_domain("pilot too small to resolve p_lo (need reps * p_lo >= 10)");
  }
  std::vector<double> values(reps);
  for_each_u(kernel, model, n, opts,
             [&](std::uint64_t r, double u) { values[r] = u; });
  std::sort(values.begin(), values.end());
  const std::uint64_t positive =
      values.end() - std::upper_bound(values.begin(), values.end(), 0.0);
  const double p_zero =
      static_cast<double>(positive) / static_cast<double>(reps);
  const double hi = std::min(p_hi, 0.95 * p_zero);
  if (!(hi > p_lo)) {
    throw_regime(
        "U-statistic exceeds 0 too rarely to span the requested "
        "probability range (P(U > 0) ~= " +
        std::to_string(p_zero) + ")");
  }
  std::vector<double> grid(points);
  const double ratio = std::pow(p_lo / hi, 1.0 / (points - 1.0));
  double p = hi;
  for (std::size_t j = 0; j < points; ++j) {
    auto idx = static_cast<std::uint64_t>(
        std::floor((1.0 - p) * static_cast<double>(reps)));
    idx = std::min<std::uint64_t>(idx, reps - 1);
    grid[j] = values[idx];
    p *= ratio;
  }
  for (std::size_t j = 1; j < points; ++j) {
    if (!(grid[j] > grid[j - 1])) {
      grid[j] = std::nextafter(grid[j - 1],
                               std::numeric_limits<double>::infinity());
    }
  }
  return grid;
}

}  // namespace utail

// Large-deviation diagnostics tests: the minorant lower bound, the
// lower/upper sandwich on Monte Carlo estimates, the independent kernel
// tail oracle, the assumption check battery, the ratio scan across sample
// sizes, and the mean-square decomposition for the product kernel.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "utail/bounds.hpp"
#include "utail/errors.hpp"
#include "utail/kernels.hpp"
#include "utail/ldp.hpp"
#include "utail/mc_engine.hpp"
#include "utail/rng.hpp"
#include "utail/special.hpp"
#include "utail/tail_models.hpp"

using utail::DistributionModel;
using utail::KernelSpec;
using utail::KernelTail;
using utail::LdpScanOptions;
using utail::VChoice;
using utail::VMode;

namespace {

utail::errc thrown_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const utail::error& e) {
    return e.kind();
  }
  return utail::errc::domain;
}

}  // namespace

TEST_CASE("minorant lower bound closed forms") {
  auto expm = DistributionModel::exponential(1.0);
  const auto zero = utail::lower_bound(KernelSpec::maxabs(2, 1.5), expm, 100,
                                       2.0, 0.0);
  CHECK(zero.value == 0.0);
  CHECK(std::isinf(zero.log_value));
  CHECK(thrown_kind([&] {
          utail::lower_bound(KernelSpec::maxabs(2, 1.5), expm, 100, 2.0,
                             -0.1);
        }) == utail::errc::domain);

  // maxabs: prefactor * P(|X| > n t / m + c).
  const auto mx = utail::lower_bound(KernelSpec::maxabs(2, 1.5), expm, 100,
                                     2.0);
  CHECK(mx.value == doctest::Approx(0.09 * std::exp(-101.5)).epsilon(1e-12));
  CHECK(mx.log_value ==
        doctest::Approx(std::log(0.09) - 101.5).epsilon(1e-12));
  CHECK_FALSE(mx.small_n_warning);
  CHECK(utail::lower_bound(KernelSpec::maxabs(2, 1.5), expm, 10, 2.0)
            .small_n_warning);
}

TEST_CASE("lower bound and upper bound sandwich the Monte Carlo estimate") {
  auto expm = DistributionModel::exponential(1.0);
  const auto kernel = KernelSpec::absdiff(1.0);
  const std::size_t n = 60;
  const double t = 0.4;
  utail::McOptions opts;
  opts.replications = 200000;
  opts.master_seed = 81;
  const auto pt = utail::run_tail_estimation(kernel, expm, n, {t}, opts)[0];
  REQUIRE(pt.exceedances >= 50);

  const auto lo = utail::lower_bound(kernel, expm, n, t);
  CHECK(lo.value <= pt.ci_high);

  KernelTail tail(kernel, expm);
  VChoice choice;
  choice.mode = VMode::mc_estimate;
  choice.reps = 200000;
  const auto v = utail::resolve_v(tail, n, t, 0.9, choice, 81);
  const auto hi = utail::evaluate_upper_bound(tail, n, t, 0.9, v.value);
  CHECK(hi.total >= pt.ci_low);
}

TEST_CASE("kernel tail oracle closed forms") {
  auto expm = DistributionModel::exponential(1.0);
  // |X - Y| is Laplace for exponential inputs: log P(|X-Y| - 1 > u) = -(u+1).
  for (double u : {1.0, 5.0, 20.0}) {
    CHECK(utail::log_kernel_tail_oracle(KernelSpec::absdiff(1.0), expm, u) ==
          doctest::Approx(-(u + 1.0)).epsilon(1e-6));
  }
  // maxabs: exact survival of the pairwise maximum.
  for (double u : {0.5, 3.0, 10.0}) {
    const double s = std::exp(-(u + 1.5));
    CHECK(utail::log_kernel_tail_oracle(KernelSpec::maxabs(2, 1.5), expm,
                                        u) ==
          doctest::Approx(std::log(2.0 * s - s * s)).epsilon(1e-10));
  }
  CHECK(utail::log_kernel_tail_oracle(KernelSpec::identity(1.0), expm, 4.0) ==
        doctest::Approx(-5.0).epsilon(1e-10));
  // (X - Y)^2 > 12 iff |X - Y| > sqrt(12).
  CHECK(utail::log_kernel_tail_oracle(KernelSpec::sqdiff(0.0), expm, 12.0) ==
        doctest::Approx(-std::sqrt(12.0)).epsilon(1e-5));
  auto swei = DistributionModel::make_signed(
      DistributionModel::weibull(1.0, 0.5));
  CHECK(thrown_kind([&] {
          utail::log_kernel_tail_oracle(KernelSpec::omegasq(), swei, 5.0);
        }) == utail::errc::unsupported);
}

TEST_CASE("I stays below the oracle tail exponent") {
  struct Config {
    KernelSpec kernel;
    DistributionModel model;
    double u_hi;
  };
  std::vector<Config> configs = {
      {KernelSpec::maxabs(2, 1.5), DistributionModel::exponential(1.0), 50.0},
      {KernelSpec::absdiff(3.0), DistributionModel::weibull(1.0, 0.5), 300.0},
  };
  for (const auto& config : configs) {
    CAPTURE(config.kernel.token());
    KernelTail tail(config.kernel, config.model);
    const double u_lo = std::max(0.5, tail.positivity_threshold() + 0.1);
    for (int i = 0; i < 20; ++i) {
      const double u =
          u_lo + (config.u_hi - u_lo) * static_cast<double>(i) / 19.0;
      CHECK(tail.I(u) <=
            -utail::log_kernel_tail_oracle(config.kernel, config.model, u) +
                1e-9);
    }
  }
}

TEST_CASE("assumption battery names, order, and verdicts") {
  auto wei = DistributionModel::weibull(1.0, 0.5);
  auto expm = DistributionModel::exponential(1.0);

  const auto good = utail::check_assumptions(KernelSpec::maxabs(2, 3.5), wei,
                                             200, 2.0);
  REQUIRE(good.checks.size() == 7);
  const char* names[] = {"centered",           "model_tail_valid",
                         "kernel_tail_valid",  "subweibull_envelope",
                         "deviation_zone",     "superlog_growth",
                         "subadditive"};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(good.checks[i].name == names[i]);
    CHECK_FALSE(good.checks[i].evidence.empty());
  }
  CHECK(good.all_ok());

  // An exponential base gives envelope exponent 1: honestly flagged.
  const auto flat = utail::check_assumptions(KernelSpec::maxabs(2, 1.5), expm,
                                             100, 1.0);
  REQUIRE(flat.find("subweibull_envelope") != nullptr);
  CHECK_FALSE(flat.find("subweibull_envelope")->ok);
  // k t^2 = 50 sits just below I(50) here: outside the deviation zone.
  REQUIRE(flat.find("deviation_zone") != nullptr);
  CHECK_FALSE(flat.find("deviation_zone")->ok);
  CHECK_FALSE(flat.all_ok());
  CHECK(flat.find("no_such_check") == nullptr);

  // t = 0 is never a positive deviation.
  const auto still = utail::check_assumptions(KernelSpec::maxabs(2, 3.5), wei,
                                              200, 0.0);
  REQUIRE(still.find("deviation_zone") != nullptr);
  CHECK_FALSE(still.find("deviation_zone")->ok);
}

TEST_CASE("log-sum collapses to the slowest decay rate") {
  // -log(e^{-a n} + e^{-b n}) / n approaches min(a, b).
  const double n = 1000.0;
  const double rate =
      -utail::logaddexp(-0.3 * n, -0.7 * n) / n;
  CHECK(rate == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("product identity closed forms and brute-force agreement") {
  const auto p = utail::product_identity({1.0, 2.0, 3.0});
  CHECK(p.u_stat == doctest::Approx(11.0 / 3.0).epsilon(1e-14));
  CHECK(p.mean == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p.sum_squares == doctest::Approx(14.0).epsilon(1e-14));

  const auto z = utail::product_identity({0.0, 0.0, 0.0});
  CHECK(z.u_stat == 0.0);
  CHECK(z.mean == 0.0);
  CHECK(z.sum_squares == 0.0);

  const double a = 1.5;
  const auto pm = utail::product_identity({a, -a});
  CHECK(pm.u_stat == doctest::Approx(-a * a).epsilon(1e-14));
  CHECK(pm.mean == 0.0);
  CHECK(pm.sum_squares == doctest::Approx(2.0 * a * a).epsilon(1e-14));

  CHECK(thrown_kind([] { utail::product_identity({1.0}); }) ==
        utail::errc::size);

  auto swei = DistributionModel::make_signed(
      DistributionModel::weibull(1.0, 0.5));
  utail::RngStream stream = utail::derive_stream(67, "tests/prodid", 0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(stream.next_u64() % 11);
    std::vector<double> sample;
    for (int i = 0; i < n; ++i) sample.push_back(swei.sample(stream) * 0.5);
    const double brute =
        utail::u_statistic_bruteforce(KernelSpec::product(), sample);
    CHECK(std::abs(utail::product_identity(sample).u_stat - brute) <=
          1e-10 * std::max(1.0, std::abs(brute)));
  }
}

TEST_CASE("mean-square decomposition beats the direct product bound") {
  auto swei = DistributionModel::make_signed(
      DistributionModel::weibull(1.0, 0.5));
  const auto r = utail::product_tail_bound(swei, 100, 1.0, 0.9, VChoice{}, 3);
  CHECK(r.t_eff == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(r.i2 ==
        doctest::Approx(std::max(0.0, swei.j_value(100.0 * std::sqrt(0.5)) -
                                          std::log(2.0)))
            .epsilon(1e-12));
  CHECK(r.composite_sum ==
        doctest::Approx(r.composite_gaussian + r.composite_intermediate +
                        r.composite_union)
            .epsilon(1e-12));
  CHECK(r.v_composite > 0.0);
  CHECK(r.composite_sum < r.naive_sum);
  CHECK(r.naive.total <= 1.0);

  // Vanishing thresholds push both raw sums to (or past) 1.
  const auto tiny =
      utail::product_tail_bound(swei, 100, 1e-8, 0.9, VChoice{}, 3);
  CHECK(tiny.composite_sum >= 1.0);

  // The decomposition needs a symmetric model.
  CHECK(thrown_kind([&] {
          utail::product_tail_bound(DistributionModel::weibull(1.0, 0.5), 100,
                                    1.0, 0.9, VChoice{}, 3);
        }) == utail::errc::unsupported);
}

TEST_CASE("ratio scan rows are internally consistent and sandwiched") {
  auto expm = DistributionModel::exponential(1.0);
  const auto kernel = KernelSpec::maxabs(2, 1.5);
  KernelTail tail(kernel, expm);
  LdpScanOptions opts;
  opts.replications = 20000;
  opts.max_replications = 80000;
  opts.master_seed = 19;
  opts.stream_prefix = "tests/scan";
  const std::vector<std::size_t> ns = {20, 40};
  const double t = 0.2;
  const auto rows = utail::ldp_ratio_scan(kernel, expm, ns, t, opts);
  REQUIRE(rows.size() == 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    CAPTURE(row.n);
    CHECK(row.n == ns[i]);
    CHECK(row.k == ns[i] / 2);
    CHECK(row.t == t);
    CHECK(row.i_kt ==
          doctest::Approx(tail.I(static_cast<double>(row.k) * t))
              .epsilon(1e-12));
    CHECK(row.exceedances >= 100);
    CHECK_FALSE(row.censored);
    CHECK(row.p_hat ==
          doctest::Approx(static_cast<double>(row.exceedances) /
                          static_cast<double>(row.trials))
              .epsilon(1e-14));
    CHECK(row.neg_log_phat ==
          doctest::Approx(-std::log(row.p_hat)).epsilon(1e-12));
    CHECK(row.ratio ==
          doctest::Approx(row.neg_log_phat / row.i_kt).epsilon(1e-12));
    const auto ci =
        utail::clopper_pearson(row.exceedances, row.trials, opts.ci_level);
    CHECK(row.lower_bound <= ci.upper);
    CHECK(row.bound_total >= ci.lower);
  }

  // Same options give identical counts on a rerun.
  const auto again = utail::ldp_ratio_scan(kernel, expm, ns, t, opts);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].exceedances == again[i].exceedances);
    CHECK(rows[i].trials == again[i].trials);
  }
}

TEST_CASE("ratio scan censors starved rows and zeroes sure hits") {
  auto expm = DistributionModel::exponential(1.0);
  LdpScanOptions starve;
  starve.replications = 1000;
  starve.max_replications = 2000;
  starve.master_seed = 19;
  const auto rows = utail::ldp_ratio_scan(KernelSpec::maxabs(2, 1.5), expm,
                                          {20}, 6.0, starve);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].censored);
  CHECK(rows[0].exceedances < 100);
  CHECK(rows[0].trials == 2000);

  LdpScanOptions sure;
  sure.replications = 20000;
  sure.max_replications = 20000;
  sure.master_seed = 19;
  const auto hit = utail::ldp_ratio_scan(KernelSpec::maxabs(2, 0.0), expm,
                                         {40}, 0.2, sure);
  REQUIRE(hit.size() == 1);
  CHECK(hit[0].p_hat == 1.0);
  CHECK(hit[0].ratio == 0.0);
  CHECK_FALSE(hit[0].censored);

  CHECK(thrown_kind([&] {
          LdpScanOptions bad;
          bad.replications = 4000;
          bad.max_replications = 2000;
          utail::ldp_ratio_scan(KernelSpec::maxabs(2, 1.5), expm, {20}, 1.0,
                                bad);
        }) == utail::errc::domain);
}

TEST_CASE("phi tail exponent tracks I at large n") {
  auto expm = DistributionModel::exponential(1.0);
  const std::size_t n = 10000;
  const double t = 2.0;
  for (const auto& kernel :
       {KernelSpec::absdiff(1.0), KernelSpec::sqdiff(2.0),
        KernelSpec::maxabs(2, 1.5), KernelSpec::omegasq(0.5)}) {
    CAPTURE(kernel.token());
    KernelTail tail(kernel, expm);
    const std::uint64_t k = n / 2;
    const double ratio = -utail::log_phi_tail(kernel, expm, n, t) /
                         tail.I(static_cast<double>(k) * t);
    CHECK(ratio >= 0.8);
    CHECK(ratio <= 1.2);
  }
}

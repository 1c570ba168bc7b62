// bounds.cpp

#include "utail/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "utail/errors.hpp"
#include "utail/rng.hpp"
#include "utail/special.hpp"

namespace utail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// h_L = h 1(h <= L).
double truncated_kernel(const KernelSpec& kernel,
                        const std::vector<double>& args, double L) {
  double h = eval_kernel(kernel, args);
  return h <= L ? h : 0.0;
}

double u_statistic_truncated(const KernelSpec& kernel,
                             const std::vector<double>& sample, double L) {
  const std::size_t n = sample.size();
  const int m = kernel.order;
  std::vector<std::size_t> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  std::vector<double> args(m);
  KahanSum sum;
  std::uint64_t count = 0;
  while (true) {
    for (int i = 0; i < m; ++i) args[i] = sample[idx[i]];
    sum.add(truncated_kernel(kernel, args, L));
    ++count;
    int pos = m - 1;
    while (pos >= 0 && idx[pos] == n - static_cast<std::size_t>(m - pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
  }
  return sum.value() / static_cast<double>(count);
}

}  // namespace

EstimateResult estimate_v(const KernelSpec& kernel,
                          const DistributionModel& model, double L,
                          double eta, std::uint64_t reps,
                          std::uint64_t master_seed,
                          std::string_view stream_id) {
  if (reps < 100000) throw_domain("estimate_v needs reps >= 1e5");
  if (eta < 0.0) throw_domain("estimate_v needs eta >= 0");
  if (L < 0.0) throw_domain("estimate_v needs L >= 0");
  if (eta * L > exp_arg_guard) {
    throw_regime("estimate_v: eta * L exceeds the exp guard (" +
                 to_shortest_string(eta * L) + " > 700)");
  }
  std::vector<double> args(kernel.order);
  KahanSum sum, sumsq;
  for (std::uint64_t r = 0; r < reps; ++r) {
    RngStream stream = derive_stream(master_seed, stream_id, r);
    for (double& a : args) a = model.sample(stream);
    const double h = eval_kernel(kernel, args);
    double term = 0.0;
    if (h <= 0.0) {
      term = h * h;
    } else if (h <= L) {
      term = h * h * std::exp(eta * h);
    }
    sum.add(term);
    sumsq.add(term * term);
  }
  const double n = static_cast<double>(reps);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, sumsq.value() / n - mean * mean);
  return EstimateResult{mean, std::sqrt(var / (n - 1.0))};
}

double subweibull_v_cap(double alpha, double c, double beta,
                        double second_moment) {
  if (alpha < 1.0) {
    throw_domain("subweibull_v_cap needs envelope exponent alpha >= 1");
  }
  if (!(c > 0.0)) throw_domain("subweibull_v_cap needs envelope c > 0");
  if (beta < 0.0 || beta >= 1.0) {
    throw_domain("subweibull_v_cap needs beta in [0, 1)");
  }
  if (!(second_moment >= 0.0) || !std::isfinite(second_moment)) {
    throw_domain("subweibull_v_cap needs a finite second moment");
  }
  const double d = (1.0 - beta) * c;
  return second_moment +
         std::tgamma(2.0 * alpha + 1.0) / std::pow(d, 2.0 * alpha) +
         beta * c * std::tgamma(3.0 * alpha + 1.0) /
             (3.0 * std::pow(d, 3.0 * alpha));
}

double polynomial_v_cap(double scale_c, double gamma, double beta, double L) {
  if (!(scale_c > 0.0)) throw_domain("polynomial_v_cap needs scale_c > 0");
  if (!(gamma > 1.0)) throw_domain("polynomial_v_cap needs gamma > 1");
  if (beta < 0.0 || !(beta < 1.0 - 1.0 / gamma)) {
    throw_domain("polynomial_v_cap needs beta in [0, 1 - 1/gamma)");
  }
  if (!(L > 1.0)) throw_domain("polynomial_v_cap needs L > 1");
  return scale_c * std::pow(L, 2.0 - (1.0 - beta) * gamma) * std::log(L);
}

double kernel_polynomial_gamma(const KernelSpec& kernel,
                               const DistributionModel& model) {
  auto gamma = model.polynomial_gamma();
  if (!gamma) {
    throw_domain("model " + model.token() +
                 " has no polynomial tail exponent");
  }
  const bool quadratic = kernel.family == KernelFamily::sqdiff ||
                         kernel.family == KernelFamily::omegasq ||
                         kernel.family == KernelFamily::product;
  return quadratic ? *gamma / 2.0 : *gamma;
}

double calibrate_polynomial_v_scale(const KernelSpec& kernel,
                                    const DistributionModel& model,
                                    double beta, std::uint64_t reps,
                                    std::uint64_t master_seed) {
  const double gamma = kernel_polynomial_gamma(kernel, model);
  if (!(gamma > 1.0)) {
    throw_domain("polynomial cap calibration needs effective gamma > 1");
  }
  if (beta < 0.0 || !(beta < 1.0 - 1.0 / gamma)) {
    throw_domain("polynomial cap calibration needs beta < 1 - 1/gamma");
  }
  KernelTail tail(kernel, model);
  double best = 0.0;
  double L = 2.0;
  for (int j = 0; j < 9; ++j, L *= 2.0) {
    const double eta = beta * tail.I(L) / L;
    auto est = estimate_v(kernel, model, L, eta, reps, master_seed,
                          "calibrate_v/" + std::to_string(j));
    const double shape =
        std::pow(L, 2.0 - (1.0 - beta) * gamma) * std::log(L);
    best = std::max(best, est.value / shape);
  }
  if (!(best > 0.0)) {
    throw_domain("polynomial cap calibration found no positive ratio");
  }
  return 1.25 * best;
}

double c_factor(double t, double beta, std::uint64_t k, double i_kt,
                double v) {
  if (!(t > 0.0)) throw_domain("c_factor needs t > 0");
  if (k < 1) throw_domain("c_factor needs k >= 1");
  if (v < 0.0) throw_domain("c_factor needs v >= 0");
  const double kt = static_cast<double>(k) * t;
  return 1.0 - (beta / (2.0 * t)) * (i_kt / kt) * v;
}

BoundBreakdown evaluate_upper_bound(const KernelTail& tail, std::size_t n,
                                    double t, double beta, double v) {
  const KernelSpec& kernel = tail.kernel();
  const int m = kernel.order;
  if (n < static_cast<std::size_t>(m)) {
    throw_size("bound needs n >= kernel order");
  }
  if (!(t > 0.0)) throw_domain("bound needs t > 0");
  if (!(beta > 0.0 && beta <= 1.0)) throw_domain("bound needs beta in (0, 1]");
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw_domain("bound needs a positive finite v");
  }
  BoundBreakdown out;
  out.n = n;
  out.m = m;
  out.k = n / static_cast<std::size_t>(m);
  out.t = t;
  out.beta = beta;
  out.v_used = v;
  const double k = static_cast<double>(out.k);
  const double kt = k * t;
  const double i_kt = tail.I(kt);
  out.c_factor = c_factor(t, beta, out.k, i_kt, v);
  out.log_gaussian = -k * t * t / (2.0 * v);
  out.log_intermediate = -beta * i_kt * std::max(0.5, out.c_factor);
  out.log_union = log_binom(n, static_cast<std::uint64_t>(m)) - i_kt;
  out.gaussian = safe_exp(out.log_gaussian);
  out.intermediate = safe_exp(out.log_intermediate);
  out.union_term = safe_exp(out.log_union);
  out.log_total =
      logsumexp({out.log_gaussian, out.log_intermediate, out.log_union});
  out.total = std::min(1.0, safe_exp(out.log_total));
  if (out.log_gaussian >= out.log_intermediate &&
      out.log_gaussian >= out.log_union) {
    out.region = "gaussian";
  } else if (out.log_intermediate >= out.log_union) {
    out.region = "intermediate";
  } else {
    out.region = "union";
  }
  return out;
}

ResolvedV resolve_v(const KernelTail& tail, std::size_t n, double t,
                    double beta, const VChoice& choice,
                    std::uint64_t master_seed) {
  const KernelSpec& kernel = tail.kernel();
  const DistributionModel& model = tail.model();
  const int m = kernel.order;
  if (n < static_cast<std::size_t>(m)) {
    throw_size("resolve_v needs n >= kernel order");
  }
  if (!(t > 0.0)) throw_domain("resolve_v needs t > 0");
  const std::uint64_t k = n / static_cast<std::size_t>(m);
  const double L = static_cast<double>(k) * t;
  const double eta = L > 0.0 ? beta * tail.I(L) / L : 0.0;

  auto cap_route = [&]() -> ResolvedV {
    SubweibullParams env = tail.envelope();
    const double m2 = kernel_second_moment(kernel, model);
    if (!std::isfinite(m2)) {
      throw_domain("kernel second moment diverges; no subWeibull cap");
    }
    ResolvedV out;
    out.value = subweibull_v_cap(env.alpha, env.c, beta, m2);
    out.used = VMode::subweibull_cap;
    out.detail = "subweibull cap (alpha=" + to_shortest_string(env.alpha) +
                 ", c=" + to_shortest_string(env.c) +
                 ", Eh2=" + to_shortest_string(m2) + ")";
    return out;
  };
  auto mc_route = [&]() -> ResolvedV {
    auto est = estimate_v(kernel, model, L, eta, choice.reps, master_seed,
                          "v_mc");
    if (!(est.value > 0.0)) {
      throw_domain("Monte Carlo estimate of v is zero; kernel degenerate?");
    }
    ResolvedV out;
    out.value = est.value;
    out.standard_error = est.standard_error;
    out.used = VMode::mc_estimate;
    out.detail = "mc estimate (reps=" + std::to_string(choice.reps) + ")";
    return out;
  };

  switch (choice.mode) {
    case VMode::fixed: {
      if (!(choice.fixed_value > 0.0) || !std::isfinite(choice.fixed_value)) {
        throw_domain("fixed v must be positive and finite");
      }
      ResolvedV out;
      out.value = choice.fixed_value;
      out.used = VMode::fixed;
      out.detail = "caller-supplied";
      return out;
    }
    case VMode::subweibull_cap:
      return cap_route();
    case VMode::mc_estimate:
      return mc_route();
    case VMode::polynomial_cap: {
      const double gamma = kernel_polynomial_gamma(kernel, model);
      const double scale = calibrate_polynomial_v_scale(
          kernel, model, beta, choice.reps, master_seed);
      ResolvedV out;
      out.value = polynomial_v_cap(scale, gamma, beta, L);
      out.used = VMode::polynomial_cap;
      out.detail = "polynomial cap (gamma_eff=" + to_shortest_string(gamma) +
                   ", scale=" + to_shortest_string(scale) + ")";
      return out;
    }
    case VMode::automatic: {
      if (tail.subweibull_available() && tail.envelope().alpha >= 1.0 &&
          std::isfinite(kernel_second_moment(kernel, model))) {
        return cap_route();
      }
      return mc_route();
    }
  }
  throw_domain("resolve_v: unknown mode");
}

double classify_gaussian_boundary(double alpha, std::uint64_t k) {
  if (alpha < 1.0) {
    throw_domain("gaussian boundary classification needs alpha >= 1");
  }
  if (k < 1) throw_domain("gaussian boundary classification needs k >= 1");
  const double expo = (alpha - 1.0) / (2.0 * alpha - 1.0);
  return std::pow(static_cast<double>(k), -expo);
}

MgfChainResult mgf_chain_check(const KernelSpec& kernel,
                               const DistributionModel& model, std::size_t n,
                               double lambda, double L, std::uint64_t reps,
                               std::uint64_t master_seed,
                               std::string_view stream_id) {
  const int m = kernel.order;
  if (n < static_cast<std::size_t>(m)) {
    throw_size("mgf_chain_check needs n >= kernel order");
  }
  if (n > 30) {
    throw_size("mgf_chain_check enumerates all subsets; needs n <= 30");
  }
  if (lambda < 0.0) throw_domain("mgf_chain_check needs lambda >= 0");
  if (reps < 1000) throw_domain("mgf_chain_check needs reps >= 1000");
  if (lambda * std::max(L, 0.0) > exp_arg_guard) {
    throw_regime("mgf_chain_check: lambda * L exceeds the exp guard");
  }
  const std::uint64_t k = n / static_cast<std::size_t>(m);
  const double eta = lambda / static_cast<double>(k);

  std::vector<double> sample(n), args(m);
  KahanSum sx, sxx;  // e^{lambda U}
  KahanSum sy, syy;  // e^{eta h_L}
  KahanSum sv, svv;  // v(L, eta) integrand
  for (std::uint64_t r = 0; r < reps; ++r) {
    RngStream stream = derive_stream(master_seed, stream_id, r);
    for (double& x : sample) x = model.sample(stream);
    const double u = u_statistic_truncated(kernel, sample, L);
    const double x = std::exp(lambda * u);
    sx.add(x);
    sxx.add(x * x);
    for (int i = 0; i < m; ++i) args[i] = sample[i];
    const double hl = truncated_kernel(kernel, args, L);
    const double y = std::exp(eta * hl);
    sy.add(y);
    syy.add(y * y);
    double term = 0.0;
    if (hl <= 0.0) {
      term = hl * hl;
    } else {
      term = hl * hl * std::exp(eta * hl);
    }
    sv.add(term);
    svv.add(term * term);
  }
  const double nn = static_cast<double>(reps);
  auto mean_se = [&](const KahanSum& s, const KahanSum& ss) {
    const double mean = s.value() / nn;
    const double var = std::max(0.0, ss.value() / nn - mean * mean);
    return std::pair<double, double>(mean, std::sqrt(var / (nn - 1.0)));
  };
  auto [bx, se_x] = mean_se(sx, sxx);
  auto [ay, se_y] = mean_se(sy, syy);
  auto [vv, se_v] = mean_se(sv, svv);

  MgfChainResult out;
  out.ustat_mgf = bx;
  out.per_draw_mgf_pow_k = std::pow(ay, static_cast<double>(k));
  const double se_ak = static_cast<double>(k) *
                       std::pow(ay, static_cast<double>(k) - 1.0) * se_y;
  out.v_estimate = vv;
  const double kk = static_cast<double>(k);
  out.gaussian_dominating = std::exp(0.5 * kk * eta * eta * vv);
  const double se_g =
      out.gaussian_dominating * 0.5 * kk * eta * eta * se_v;
  out.gap_chain = out.per_draw_mgf_pow_k - out.ustat_mgf;
  out.gap_chain_se = std::hypot(se_ak, se_x);
  out.gap_gaussian = out.gaussian_dominating - out.per_draw_mgf_pow_k;
  out.gap_gaussian_se = std::hypot(se_g, se_ak);
  return out;
}

}  // namespace utail

// kernels.cpp
//
// Kernel catalog: exact U-statistic paths, centering and moment tables,
// the phi minorant with its exact tail, and the conservative kernel tail
// function I built from the model's J.

#include "utail/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "token_detail.hpp"
#include "utail/errors.hpp"
#include "utail/special.hpp"

namespace utail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::absdiff: return "absdiff";
    case KernelFamily::sqdiff: return "sqdiff";
    case KernelFamily::maxabs: return "maxabs";
    case KernelFamily::omegasq: return "omegasq";
    case KernelFamily::product: return "product";
    case KernelFamily::identity: return "identity";
  }
  return "?";
}

template <typename F>
double integrate01(F&& f) {
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(std::forward<F>(f), 0.0, 1.0);
}

template <typename F>
double integrate(F&& f, double a, double b) {
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  if (!(b > a)) return 0.0;
  return integrator.integrate(std::forward<F>(f), a, b);
}

// E[max(X_1,...,X_m)^r] for i.i.d. nonnegative draws. Closed inclusion-
// exclusion forms where the family's min is closed under i.i.d. minima
// (E max^r = sum_j C(m,j)(-1)^{j+1} E[min_j]^r), quantile-transform
// quadrature otherwise (max of m uniforms has density m u^{m-1}).
double emax_moment(const DistributionModel& base, int m, int r) {
  if (!std::isfinite(base.abs_moment(r))) return kInf;
  const double dr = static_cast<double>(r);
  switch (base.family()) {
    case ModelFamily::exponential:
    case ModelFamily::weibull: {
      const bool exp_family = base.family() == ModelFamily::exponential;
      const double scale = exp_family ? 1.0 / base.param1() : base.param1();
      const double shape = exp_family ? 1.0 : base.param2();
      double alt = 0.0;
      for (int j = 1; j <= m; ++j) {
        double term = binom(static_cast<std::uint64_t>(m),
                            static_cast<std::uint64_t>(j)) *
                      std::pow(static_cast<double>(j), -dr / shape);
        alt += (j % 2 == 1) ? term : -term;
      }
      return std::tgamma(1.0 + dr / shape) * std::pow(scale, dr) * alt;
    }
    case ModelFamily::pareto: {
      const double xm = base.param1();
      const double alpha = base.param2();
      double alt = 0.0;
      for (int j = 1; j <= m; ++j) {
        double term = binom(static_cast<std::uint64_t>(m),
                            static_cast<std::uint64_t>(j)) *
                      (j * alpha) / (j * alpha - dr);
        alt += (j % 2 == 1) ? term : -term;
      }
      return std::pow(xm, dr) * alt;
    }
    default: {
      const double dm = static_cast<double>(m);
      return integrate01([&](double u) {
        double q = base.quantile(u);
        double val = std::pow(q, dr) * dm * std::pow(u, dm - 1.0);
        return std::isfinite(val) ? val : 0.0;
      });
    }
  }
}

// M(x) = integral of the survival function over (x, inf) = E[(X - x)^+].
double mean_residual(const DistributionModel& base, double x) {
  switch (base.family()) {
    case ModelFamily::exponential: {
      const double rate = base.param1();
      return std::exp(-rate * x) / rate;
    }
    case ModelFamily::weibull: {
      const double scale = base.param1();
      const double shape = base.param2();
      return (scale / shape) *
             boost::math::tgamma(1.0 / shape, std::pow(x / scale, shape));
    }
    case ModelFamily::pareto: {
      const double xm = base.param1();
      const double alpha = base.param2();
      if (alpha <= 1.0) return kInf;
      double at_xm = xm / (alpha - 1.0);
      if (x < xm) return (xm - x) + at_xm;
      return std::pow(xm / x, alpha) * x / (alpha - 1.0);
    }
    default: {
      if (!std::isfinite(base.abs_moment(1))) return kInf;
      const double fx = 1.0 - base.true_tail(x);
      return integrate(
          [&](double v) {
            double q = base.quantile(v) - x;
            return std::isfinite(q) ? q : 0.0;
          },
          fx, 1.0);
    }
  }
}

// E[X^2 M(X)], the cross moment driving E[(X^2+Y^2)/2 * max(X,Y)] via
// E[X^2 max(X,Y)] = E X^3 + E[X^2 M(X)].
double e_x2_mean_residual(const DistributionModel& base) {
  if (!std::isfinite(base.abs_moment(3))) return kInf;
  switch (base.family()) {
    case ModelFamily::exponential: {
      const double rate = base.param1();
      return 1.0 / (4.0 * rate * rate * rate);
    }
    case ModelFamily::pareto: {
      const double xm = base.param1();
      const double alpha = base.param2();
      if (alpha <= 3.0 / 2.0) return kInf;
      return alpha * xm * xm * xm / ((alpha - 1.0) * (2.0 * alpha - 3.0));
    }
    default: {
      return integrate01([&](double u) {
        double q = base.quantile(u);
        double val = q * q * mean_residual(base, q);
        return std::isfinite(val) ? val : 0.0;
      });
    }
  }
}

struct RawKernelMoments {
  double mean = 0.0;
  double second = 0.0;  // E[h_raw^2], +inf when divergent
};

RawKernelMoments raw_moments(const KernelSpec& kernel,
                             const DistributionModel& model) {
  const DistributionModel base = magnitude_model(model);
  const bool sym = model.is_signed();
  const double mu1 = model.abs_moment(1);
  const double mu2 = model.abs_moment(2);
  RawKernelMoments out;
  switch (kernel.family) {
    case KernelFamily::identity:
      out.mean = sym ? 0.0 : mu1;
      out.second = mu2;
      return out;
    case KernelFamily::product:
      out.mean = sym ? 0.0 : mu1 * mu1;
      out.second = mu2 * mu2;
      return out;
    case KernelFamily::absdiff: {
      double emax = emax_moment(base, 2, 1);
      out.mean = sym ? emax : 2.0 * (emax - mu1);
      out.second = sym ? 2.0 * mu2 : 2.0 * (mu2 - mu1 * mu1);
      return out;
    }
    case KernelFamily::sqdiff: {
      const double mu3 = model.abs_moment(3);
      const double mu4 = model.abs_moment(4);
      out.mean = sym ? 2.0 * mu2 : 2.0 * (mu2 - mu1 * mu1);
      out.second = sym ? 2.0 * mu4 + 6.0 * mu2 * mu2
                       : 2.0 * mu4 - 8.0 * mu3 * mu1 + 6.0 * mu2 * mu2;
      return out;
    }
    case KernelFamily::maxabs:
      out.mean = emax_moment(base, kernel.order, 1);
      out.second = emax_moment(base, kernel.order, 2);
      return out;
    case KernelFamily::omegasq: {
      const double mu3 = model.abs_moment(3);
      const double mu4 = model.abs_moment(4);
      const double emax1 = emax_moment(base, 2, 1);
      const double x2m = e_x2_mean_residual(base);
      if (sym) {
        // Sign-conditioned expansion over the four Rademacher combinations.
        out.mean = mu2 - 0.5 * emax1;
        out.second = 0.5 * (mu4 + mu2 * mu2) - mu3 - x2m + mu2;
      } else {
        const double emax2 = emax_moment(base, 2, 2);
        out.mean = mu2 - emax1;
        out.second =
            0.5 * (mu4 + mu2 * mu2) - 2.0 * (mu3 + x2m) + emax2;
      }
      return out;
    }
  }
  throw_domain("raw_moments: unknown kernel family");
}

}  // namespace

// ---------------------------------------------------------------------------
// KernelSpec

KernelSpec KernelSpec::absdiff(double c) {
  return KernelSpec{KernelFamily::absdiff, 2, c};
}
KernelSpec KernelSpec::sqdiff(double c) {
  return KernelSpec{KernelFamily::sqdiff, 2, c};
}
KernelSpec KernelSpec::maxabs(int m, double c) {
  if (m < 1) throw_domain("maxabs order must be >= 1");
  return KernelSpec{KernelFamily::maxabs, m, c};
}
KernelSpec KernelSpec::omegasq(double c) {
  return KernelSpec{KernelFamily::omegasq, 2, c};
}
KernelSpec KernelSpec::product(double c) {
  return KernelSpec{KernelFamily::product, 2, c};
}
KernelSpec KernelSpec::identity(double c) {
  return KernelSpec{KernelFamily::identity, 1, c};
}

KernelSpec KernelSpec::parse(std::string_view token) {
  static const std::vector<std::string> names = {
      "absdiff", "sqdiff", "maxabs", "omegasq", "product", "identity"};
  auto bt = detail::split_braced(token, "kernel");
  if (bt.name == "maxabs") {
    int m = 2;
    if (bt.has_braces) {
      long long v = detail::parse_int_exact(bt.body, "kernel maxabs order");
      if (v < 1 || v > 64) {
        throw_config("kernel maxabs order must be in [1, 64], got " +
                     std::to_string(v));
      }
      m = static_cast<int>(v);
    }
    return maxabs(m);
  }
  for (const auto& n : names) {
    if (bt.name != n) continue;
    if (bt.has_braces) {
      throw_config("kernel '" + n + "' takes no parameters");
    }
    if (n == "absdiff") return absdiff();
    if (n == "sqdiff") return sqdiff();
    if (n == "omegasq") return omegasq();
    if (n == "product") return product();
    return identity();
  }
  throw_config(detail::with_suggestions(
      "unknown kernel family '" + bt.name + "'", bt.name, names));
}

std::string KernelSpec::token() const {
  if (family == KernelFamily::maxabs) {
    return "maxabs{" + std::to_string(order) + "}";
  }
  return family_name(family);
}

std::string KernelSpec::describe() const {
  switch (family) {
    case KernelFamily::absdiff: return "h(x,y) = |x - y| - c";
    case KernelFamily::sqdiff: return "h(x,y) = (x - y)^2 - c";
    case KernelFamily::maxabs:
      return "h(x1..x" + std::to_string(order) + ") = max_i |x_i| - c";
    case KernelFamily::omegasq:
      return "h(x,y) = (x^2 + y^2)/2 - max(x,y) - c";
    case KernelFamily::product: return "h(x,y) = x y - c";
    case KernelFamily::identity: return "h(x) = x - c";
  }
  return "?";
}

const std::vector<KernelCatalogEntry>& kernel_catalog() {
  static const std::vector<KernelCatalogEntry> entries = {
      {"absdiff", "h(x,y) = |x - y| - c, order 2"},
      {"sqdiff", "h(x,y) = (x - y)^2 - c, order 2"},
      {"maxabs{m}", "h(x1..xm) = max_i |x_i| - c, default m=2"},
      {"omegasq", "h(x,y) = (x^2 + y^2)/2 - max(x,y) - c, order 2"},
      {"product", "h(x,y) = x y - c, order 2"},
      {"identity", "h(x) = x - c, order 1"},
  };
  return entries;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation and U-statistics

double eval_kernel(const KernelSpec& kernel, const std::vector<double>& args) {
  if (static_cast<int>(args.size()) != kernel.order) {
    throw_arity("kernel " + kernel.token() + " takes " +
                std::to_string(kernel.order) + " arguments, got " +
                std::to_string(args.size()));
  }
  const double c = kernel.centering;
  switch (kernel.family) {
    case KernelFamily::identity:
      return args[0] - c;
    case KernelFamily::absdiff:
      return std::abs(args[0] - args[1]) - c;
    case KernelFamily::sqdiff: {
      double d = args[0] - args[1];
      return d * d - c;
    }
    case KernelFamily::product:
      return args[0] * args[1] - c;
    case KernelFamily::omegasq:
      return 0.5 * (args[0] * args[0] + args[1] * args[1]) -
             std::max(args[0], args[1]) - c;
    case KernelFamily::maxabs: {
      double best = 0.0;
      for (double a : args) best = std::max(best, std::abs(a));
      return best - c;
    }
  }
  throw_domain("eval_kernel: unknown kernel family");
}

UStatEvaluator::UStatEvaluator(const KernelSpec& kernel, std::size_t n)
    : kernel_(kernel), n_(n) {
  if (n < static_cast<std::size_t>(kernel.order)) {
    throw_size("sample size " + std::to_string(n) + " below kernel order " +
               std::to_string(kernel.order));
  }
  if (kernel.family == KernelFamily::maxabs) {
    // w_i = C(i-1, m-1) / C(n, m) for the i-th order statistic (1-based),
    // built by the overflow-free ratio recurrence w_i = w_{i-1} (i-1)/(i-m).
    const int m = kernel.order;
    weights_.assign(n, 0.0);
    double w = 1.0;
    for (int j = 1; j <= m; ++j) {
      w *= static_cast<double>(j) / static_cast<double>(n - m + j);
    }
    weights_[m - 1] = w;
    for (std::size_t i = m + 1; i <= n; ++i) {
      w *= static_cast<double>(i - 1) / static_cast<double>(i - m);
      weights_[i - 1] = w;
    }
  }
}

double UStatEvaluator::eval(std::vector<double>& sample) const {
  if (sample.size() != n_) {
    throw_size("evaluator built for n=" + std::to_string(n_) + ", got " +
               std::to_string(sample.size()));
  }
  const double n = static_cast<double>(n_);
  const double c = kernel_.centering;
  switch (kernel_.family) {
    case KernelFamily::identity: {
      KahanSum s;
      for (double x : sample) s.add(x);
      return s.value() / n - c;
    }
    case KernelFamily::product: {
      KahanSum s1, s2;
      for (double x : sample) {
        s1.add(x);
        s2.add(x * x);
      }
      return (s1.value() * s1.value() - s2.value()) / (n * (n - 1.0)) - c;
    }
    case KernelFamily::sqdiff: {
      KahanSum s;
      for (double x : sample) s.add(x);
      const double mean = s.value() / n;
      KahanSum ssd;
      for (double x : sample) ssd.add((x - mean) * (x - mean));
      return 2.0 * ssd.value() / (n - 1.0) - c;
    }
    case KernelFamily::absdiff: {
      std::sort(sample.begin(), sample.end());
      KahanSum s;
      for (std::size_t i = 1; i <= n_; ++i) {
        s.add((2.0 * static_cast<double>(i) - n - 1.0) * sample[i - 1]);
      }
      return s.value() / (0.5 * n * (n - 1.0)) - c;
    }
    case KernelFamily::omegasq: {
      std::sort(sample.begin(), sample.end());
      KahanSum sq, smax;
      for (std::size_t i = 1; i <= n_; ++i) {
        sq.add(sample[i - 1] * sample[i - 1]);
        smax.add(static_cast<double>(i - 1) * sample[i - 1]);
      }
      return (0.5 * (n - 1.0) * sq.value() - smax.value()) /
                 (0.5 * n * (n - 1.0)) -
             c;
    }
    case KernelFamily::maxabs: {
      for (double& x : sample) x = std::abs(x);
      std::sort(sample.begin(), sample.end());
      KahanSum s;
      for (std::size_t i = kernel_.order; i <= n_; ++i) {
        s.add(weights_[i - 1] * sample[i - 1]);
      }
      return s.value() - c;
    }
  }
  throw_domain("u_statistic: unknown kernel family");
}

double u_statistic(const KernelSpec& kernel, std::vector<double> sample) {
  UStatEvaluator evaluator(kernel, sample.size());
  return evaluator.eval(sample);
}

double u_statistic_bruteforce(const KernelSpec& kernel,
                              const std::vector<double>& sample) {
  const std::size_t n = sample.size();
  const int m = kernel.order;
  if (n < static_cast<std::size_t>(m)) {
    throw_size("sample size " + std::to_string(n) + " below kernel order " +
               std::to_string(m));
  }
  const double count = binom(n, static_cast<std::uint64_t>(m));
  if (!(count <= 1e6)) {
    throw_size("bruteforce U-statistic needs C(n,m) <= 1e6, got C(" +
               std::to_string(n) + "," + std::to_string(m) + ")");
  }
  std::vector<std::size_t> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  std::vector<double> args(m);
  KahanSum sum;
  while (true) {
    for (int i = 0; i < m; ++i) args[i] = sample[idx[i]];
    sum.add(eval_kernel(kernel, args));
    // Advance to the next m-subset in lexicographic order.
    int pos = m - 1;
    while (pos >= 0 && idx[pos] == n - static_cast<std::size_t>(m - pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
  }
  return sum.value() / count;
}

// ---------------------------------------------------------------------------
// Centering and second moments

CenteringResult centering_constant(const KernelSpec& kernel,
                                   const DistributionModel& model) {
  RawKernelMoments raw = raw_moments(kernel, model);
  if (!std::isfinite(raw.mean)) {
    throw_domain("centering for " + kernel.token() + " on " + model.token() +
                 " diverges (raw kernel mean is infinite)");
  }
  return CenteringResult{raw.mean, 0.0};
}

CenteringResult centering_constant_mc(const KernelSpec& kernel,
                                      const DistributionModel& model,
                                      std::uint64_t reps, RngStream& stream) {
  if (reps < 2) throw_domain("centering_constant_mc needs reps >= 2");
  KernelSpec raw = kernel.with_centering(0.0);
  std::vector<double> args(raw.order);
  KahanSum sum, sumsq;
  for (std::uint64_t r = 0; r < reps; ++r) {
    for (double& a : args) a = model.sample(stream);
    double h = eval_kernel(raw, args);
    sum.add(h);
    sumsq.add(h * h);
  }
  const double n = static_cast<double>(reps);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, sumsq.value() / n - mean * mean);
  return CenteringResult{mean, std::sqrt(var / (n - 1.0))};
}

double kernel_second_moment(const KernelSpec& kernel,
                            const DistributionModel& model) {
  RawKernelMoments raw = raw_moments(kernel, model);
  if (!std::isfinite(raw.second) || !std::isfinite(raw.mean)) return kInf;
  const double c = kernel.centering;
  return raw.second - 2.0 * c * raw.mean + c * c;
}

// ---------------------------------------------------------------------------
// phi minorant and its exact tail

namespace {

double phi_box_radius(const DistributionModel& model, std::size_t n) {
  return model.j_inverse(std::log(2.0 * static_cast<double>(n)));
}

void check_phi_supported(const KernelSpec& kernel) {
  if (kernel.family == KernelFamily::product) {
    throw_unsupported(
        "phi minorant is unsupported for the product kernel (h is unbounded "
        "below on the box)");
  }
}

}  // namespace

double phi_value(const KernelSpec& kernel, const DistributionModel& model,
                 std::size_t n, double x) {
  check_phi_supported(kernel);
  if (n < static_cast<std::size_t>(kernel.order)) {
    throw_size("phi_value needs n >= kernel order");
  }
  const double c = kernel.centering;
  const double R = phi_box_radius(model, n);
  switch (kernel.family) {
    case KernelFamily::identity:
      return x - c;
    case KernelFamily::maxabs:
      return std::abs(x) - c;
    case KernelFamily::absdiff:
      return std::abs(x) <= R ? -c : std::abs(x) - R - c;
    case KernelFamily::sqdiff: {
      if (std::abs(x) <= R) return -c;
      double d = std::abs(x) - R;
      return d * d - c;
    }
    case KernelFamily::omegasq: {
      if (R < 1.0) {
        throw_regime(
            "omegasq phi minorant needs box radius R >= 1 (larger n)");
      }
      if (x > 0.5) return 0.5 * x * x - x - c;
      return 0.5 * x * x - 0.5 - c;
    }
    default:
      throw_unsupported("phi minorant unsupported for " + kernel.token());
  }
}

double phi_tail(const KernelSpec& kernel, const DistributionModel& model,
                std::size_t n, double t) {
  check_phi_supported(kernel);
  if (n < static_cast<std::size_t>(kernel.order)) {
    throw_size("phi_tail needs n >= kernel order");
  }
  const double c = kernel.centering;
  const double R = phi_box_radius(model, n);
  const double s = static_cast<double>(n) * t / kernel.order;
  const double a = s + c;  // threshold for the uncentered phi
  switch (kernel.family) {
    case KernelFamily::identity: {
      if (a <= 0.0) {
        return model.is_signed() ? 1.0 - model.left_tail(-a) : 1.0;
      }
      return model.right_tail(a);
    }
    case KernelFamily::maxabs:
      return a <= 0.0 ? 1.0 : model.true_tail(a);
    case KernelFamily::absdiff:
      return a <= 0.0 ? 1.0 : model.true_tail(a + R);
    case KernelFamily::sqdiff:
      return a <= 0.0 ? 1.0 : model.true_tail(R + std::sqrt(a));
    case KernelFamily::omegasq: {
      if (R < 1.0) {
        throw_regime(
            "omegasq phi minorant needs box radius R >= 1 (larger n)");
      }
      if (2.0 * a + 1.0 <= 0.0) return 1.0;
      const double hi = 1.0 + std::sqrt(1.0 + 2.0 * a);
      const double r = std::sqrt(2.0 * a + 1.0);
      double p = model.right_tail(hi) + model.left_tail(r);
      if (r <= 0.5) p += model.right_tail(r) - model.right_tail(0.5);
      return std::min(p, 1.0);
    }
    default:
      throw_unsupported("phi tail unsupported for " + kernel.token());
  }
}

double log_phi_tail(const KernelSpec& kernel, const DistributionModel& model,
                    std::size_t n, double t) {
  check_phi_supported(kernel);
  if (n < static_cast<std::size_t>(kernel.order)) {
    throw_size("phi_tail needs n >= kernel order");
  }
  const double c = kernel.centering;
  const double R = phi_box_radius(model, n);
  const double s = static_cast<double>(n) * t / kernel.order;
  const double a = s + c;
  switch (kernel.family) {
    case KernelFamily::identity:
      if (a <= 0.0) return std::log(phi_tail(kernel, model, n, t));
      return model.log_right_tail(a);
    case KernelFamily::maxabs:
      return a <= 0.0 ? 0.0 : model.log_true_tail(a);
    case KernelFamily::absdiff:
      return a <= 0.0 ? 0.0 : model.log_true_tail(a + R);
    case KernelFamily::sqdiff:
      return a <= 0.0 ? 0.0 : model.log_true_tail(R + std::sqrt(a));
    case KernelFamily::omegasq: {
      if (R < 1.0) {
        throw_regime(
            "omegasq phi minorant needs box radius R >= 1 (larger n)");
      }
      if (2.0 * a + 1.0 <= 0.0) return 0.0;
      const double hi = 1.0 + std::sqrt(1.0 + 2.0 * a);
      const double r = std::sqrt(2.0 * a + 1.0);
      double lp = model.log_right_tail(hi);
      if (model.is_signed()) lp = logaddexp(lp, model.log_right_tail(r));
      if (r <= 0.5) {
        double extra = model.right_tail(r) - model.right_tail(0.5);
        if (extra > 0.0) lp = logaddexp(lp, std::log(extra));
      }
      return std::min(lp, 0.0);
    }
    default:
      throw_unsupported("phi tail unsupported for " + kernel.token());
  }
}

// ---------------------------------------------------------------------------
// KernelTail

namespace {

// Layered difference-tail form g(z) = J(z-1) - log(3z) - b, valid for
// z >= 2 e^{-b} + 4. The returned activation additionally pushes past the
// last point where g decreases on a dense geometric scan, so that the max
// over forms stays non-decreasing; +inf disables the form for tails whose
// J grows too slowly for g to ever settle.
double layered_activation(const DistributionModel& model, double b) {
  const double z0 = 2.0 * std::exp(-b) + 4.0;
  auto g = [&](double z) {
    return model.j_value(z - 1.0) - std::log(3.0 * z) - b;
  };
  double zmax = model.j_inverse(800.0);
  if (!std::isfinite(zmax)) zmax = 1e15;
  zmax = std::max(zmax, 4.0 * z0);
  const int points = 4000;
  const double step = std::pow(zmax / z0, 1.0 / (points - 1));
  double z = z0;
  double prev = g(z);
  int last_decrease = -1;
  double activation = z0;
  for (int i = 1; i < points; ++i) {
    z *= step;
    double cur = g(z);
    if (cur < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
      last_decrease = i;
      activation = z;
    }
    prev = cur;
  }
  if (last_decrease < 0) return z0;
  if (last_decrease >= points * 95 / 100) return kInf;
  return activation;
}

}  // namespace

KernelTail::KernelTail(const KernelSpec& kernel, const DistributionModel& model)
    : kernel_(kernel), model_(model) {
  if (kernel.family == KernelFamily::omegasq && model.is_signed()) {
    throw_unsupported(
        "omegasq tail function needs a nonnegative-support model");
  }
  if (kernel.centering < 0.0) {
    throw_domain("kernel tail function needs centering >= 0");
  }
  b_ = model.subadditivity_shift();
  layer_activation_ = kInf;
  if (kernel.family == KernelFamily::absdiff ||
      kernel.family == KernelFamily::sqdiff) {
    layer_activation_ = layered_activation(model, b_);
  }

  // Locate the scan window: grow u until I hits the exp guard, then find the
  // first strictly positive point and the subWeibull envelope constant.
  double u_hi = 1.0;
  while (I(u_hi) < exp_arg_guard && u_hi < 1e300) u_hi *= 2.0;
  if (I(0.0) > 0.0) {
    first_positive_ = 0.0;
  } else {
    first_positive_ = u_hi;
    const int points = 2000;
    const double u_lo = u_hi * 1e-18;
    const double step = std::pow(u_hi / u_lo, 1.0 / (points - 1));
    double u = u_lo;
    for (int i = 0; i < points; ++i) {
      if (I(u) > 0.0) {
        first_positive_ = u;
        break;
      }
      u *= step;
    }
  }

  auto sw = model.subweibull_params();
  if (!sw) return;
  const bool sqrt_scale = kernel.family == KernelFamily::sqdiff ||
                          kernel.family == KernelFamily::omegasq ||
                          kernel.family == KernelFamily::product;
  const double alpha_i = sqrt_scale ? 2.0 * sw->alpha : sw->alpha;
  double analytic = sw->c;
  if (kernel.family == KernelFamily::omegasq) {
    analytic = sw->c * std::pow(2.0, 1.0 / (2.0 * sw->alpha));
  }
  const double u_lo = std::max(first_positive_, u_hi * 1e-18);
  const int points = 600;
  const double step = std::pow(u_hi / u_lo, 1.0 / (points - 1));
  double u = u_lo;
  double inf_ratio = analytic;
  for (int i = 0; i < points; ++i) {
    double iu = I(u);
    if (iu > 0.0) {
      inf_ratio = std::min(inf_ratio, iu / std::pow(u, 1.0 / alpha_i));
    }
    u *= step;
  }
  if (inf_ratio > 0.0 && std::isfinite(inf_ratio)) {
    envelope_ = SubweibullParams{alpha_i, 0.999 * inf_ratio};
  }
}

double KernelTail::raw_I(double u) const {
  const double c = kernel_.centering;
  const double w = u + c;
  const bool sym = model_.is_signed();
  switch (kernel_.family) {
    case KernelFamily::identity:
      if (w <= 0.0) return -kInf;
      return model_.j_value(w) + (sym ? kLn2 : 0.0);
    case KernelFamily::maxabs:
      if (w <= 0.0) return -kInf;
      return model_.j_value(w) - std::log(static_cast<double>(kernel_.order));
    case KernelFamily::absdiff:
    case KernelFamily::sqdiff: {
      if (w <= 0.0) return -kInf;
      const double z =
          kernel_.family == KernelFamily::absdiff ? w : std::sqrt(w);
      double best = model_.j_value(0.5 * z) - kLn2;
      if (z >= layer_activation_) {
        best = std::max(
            best, model_.j_value(z - 1.0) - std::log(3.0 * z) - b_);
      }
      return best;
    }
    case KernelFamily::omegasq:
      if (2.0 * w + 1.0 <= 0.0) return -kInf;
      return model_.j_value(std::sqrt(2.0 * w + 1.0)) - std::log(3.0);
    case KernelFamily::product: {
      double best = sym ? kLn2 : -kInf;
      if (w > 0.0) {
        best = std::max(best, model_.j_value(std::sqrt(w)) - kLn2);
      }
      return best;
    }
  }
  throw_domain("kernel tail: unknown kernel family");
}

double KernelTail::I(double u) const {
  if (u < 0.0) throw_domain("kernel tail function is defined for u >= 0");
  return std::max(0.0, raw_I(u));
}

SubweibullParams KernelTail::envelope() const {
  if (!envelope_) {
    throw_unsupported("no subWeibull envelope for " + kernel_.token() +
                      " on " + model_.token());
  }
  return *envelope_;
}

KernelTail kernel_tail_I(const KernelSpec& kernel,
                         const DistributionModel& model) {
  return KernelTail(kernel, model);
}

}  // namespace utail

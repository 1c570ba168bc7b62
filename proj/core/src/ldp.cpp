// ldp.cpp

#include "utail/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <boost/math/quadrature/gauss.hpp>

#include "utail/errors.hpp"
#include "utail/mc_engine.hpp"
#include "utail/special.hpp"

namespace utail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log P(X > a) for any real a (the model accessors need a >= 0).
double log_right_any(const DistributionModel& model, double a) {
  if (a >= 0.0) return model.log_right_tail(a);
  const double p =
      1.0 - (model.is_signed() ? model.left_tail(-a) : 0.0);
  return std::log(p);
}

// log of integral_0^1 exp(g(v)) dv, composite Gauss-Legendre in log space.
template <typename G>
double log_integral01(G&& g) {
  using rule = boost::math::quadrature::gauss<double, 61>;
  const auto& xs = rule::abscissa();
  const auto& ws = rule::weights();
  const int panels = 8;
  std::vector<double> terms;
  terms.reserve(panels * 61);
  for (int p = 0; p < panels; ++p) {
    const double a = static_cast<double>(p) / panels;
    const double b = static_cast<double>(p + 1) / panels;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double lw = std::log(ws[i] * half);
      if (i == 0) {
        terms.push_back(lw + g(mid));
      } else {
        terms.push_back(lw + g(mid + half * xs[i]));
        terms.push_back(lw + g(mid - half * xs[i]));
      }
    }
  }
  return std::min(0.0, logsumexp(terms));
}

// log P(|X - Y| > z) for iid draws.
double log_absdiff_tail(const DistributionModel& model, double z) {
  if (z <= 0.0) return 0.0;
  const double li = log_integral01([&](double v) {
    return log_right_any(model, model.quantile(v) + z);
  });
  return std::min(0.0, std::log(2.0) + li);
}

// log P((max-1)^2 + min^2 > zsq) for iid nonnegative draws.
double log_omegasq_tail(const DistributionModel& model, double zsq) {
  if (zsq <= 0.0) return 0.0;
  auto inner = [&](double v) {
    const double x = model.quantile(v);
    const double d = zsq - (x - 1.0) * (x - 1.0);
    if (d <= 0.0) return log1mexp(model.log_true_tail(x));
    const double gate = std::sqrt(d);
    if (gate >= x) return -kInf;
    const double lg = model.log_true_tail(gate);
    const double lx = model.log_true_tail(x);
    if (lx >= lg) return -kInf;
    return lg + log1mexp(lx - lg);
  };
  return std::min(0.0, std::log(2.0) + log_integral01(inner));
}

// log P(X Y > w) for iid nonnegative draws.
double log_product_tail(const DistributionModel& model, double w) {
  if (w <= 0.0) return 0.0;
  return log_integral01([&](double v) {
    const double q = model.quantile(v);
    if (!(q > 0.0)) return -kInf;
    return model.log_true_tail(w / q);
  });
}

// Bisection inverse of a nonnegative non-decreasing function.
template <typename F>
double monotone_inverse(F&& f, double target) {
  double hi = 1.0;
  while (f(hi) < target && hi < 1e300) hi *= 2.0;
  if (f(hi) < target) return kInf;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::string join_ratios(const std::vector<double>& rs) {
  std::string out;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) out += ", ";
    out += to_shortest_string(rs[i]);
  }
  return out;
}

AssumptionCheck superlog_check(const DistributionModel& model) {
  AssumptionCheck chk{"superlog_growth", true, ""};
  std::vector<double> ratios;
  for (double target : {20.0, 60.0, 200.0, 600.0}) {
    const double ti = model.j_inverse(target);
    if (!std::isfinite(ti) || ti <= 1.0) {
      chk.ok = false;
      chk.evidence =
          "J(t)/log t undefined at J = " + to_shortest_string(target);
      break;
    }
    ratios.push_back(model.j_value(ti) / std::log(ti));
  }
  if (ratios.size() == 4) {
    chk.ok = ratios[3] >= 2.0 * ratios[0] && ratios[3] >= 10.0;
    chk.evidence =
        "J(t)/log t at J in {20,60,200,600}: " + join_ratios(ratios);
  }
  return chk;
}

AssumptionCheck subadditive_check(const DistributionModel& model) {
  AssumptionCheck chk{"subadditive", true, ""};
  const double b = model.subadditivity_shift();
  const double lo = model.j_inverse(1e-3);
  const double hi = model.j_inverse(300.0);
  double worst = -kInf;
  if (std::isfinite(lo) && std::isfinite(hi) && hi > lo && lo > 0.0) {
    const int grid = 100;
    const double step = std::pow(hi / lo, 1.0 / (grid - 1));
    double x = lo;
    for (int i = 0; i < grid; ++i, x *= step) {
      double y = lo;
      for (int j = 0; j < grid; ++j, y *= step) {
        const double gap =
            model.j_value(x + y) - model.j_value(x) - model.j_value(y) - b;
        worst = std::max(worst, gap);
      }
    }
    chk.ok = worst <= 1e-9;
    chk.evidence = "max J(x+y) - J(x) - J(y) - b over 1e4 pairs = " +
                   to_shortest_string(worst) +
                   " (b = " + to_shortest_string(b) + ")";
  } else {
    chk.ok = false;
    chk.evidence = "could not build the pair grid";
  }
  return chk;
}

}  // namespace

LowerBoundResult lower_bound(const KernelSpec& kernel,
                             const DistributionModel& model, std::size_t n,
                             double t, double prefactor) {
  if (!(prefactor >= 0.0 && prefactor <= 1.0)) {
    throw_domain("lower bound prefactor must be in [0, 1]");
  }
  LowerBoundResult out;
  // prefactor 0 is the trivial bound: value 0, log -inf.
  out.log_value = std::log(prefactor) + log_phi_tail(kernel, model, n, t);
  out.value = prefactor * phi_tail(kernel, model, n, t);
  out.small_n_warning = n < 20;
  return out;
}

std::vector<LdpScanRow> ldp_ratio_scan(const KernelSpec& kernel,
                                       const DistributionModel& model,
                                       const std::vector<std::size_t>& ns,
                                       double t, const LdpScanOptions& opts) {
  if (!(t > 0.0)) throw_domain("ldp scan needs t > 0");
  if (opts.max_replications < opts.replications) {
    throw_domain("ldp scan needs max_replications >= replications");
  }
  KernelTail tail(kernel, model);
  std::vector<LdpScanRow> rows;
  rows.reserve(ns.size());
  for (std::size_t n : ns) {
    LdpScanRow row;
    row.n = n;
    row.k = n / static_cast<std::size_t>(kernel.order);
    row.t = t;
    row.i_kt = tail.I(static_cast<double>(row.k) * t);

    McOptions mo;
    mo.replications = opts.replications;
    mo.ci_level = opts.ci_level;
    mo.master_seed = opts.master_seed;
    mo.stream_id = opts.stream_prefix + "/n=" + std::to_string(n);
    mo.threads = opts.threads;
    TailPoint pt;
    while (true) {
      pt = run_tail_estimation(kernel, model, n, {t}, mo)[0];
      if (pt.exceedances >= 100 ||
          mo.replications * 2 > opts.max_replications) {
        break;
      }
      mo.replications *= 2;
    }
    row.exceedances = pt.exceedances;
    row.trials = pt.trials;
    row.p_hat = pt.p_hat;
    row.neg_log_phat = pt.p_hat > 0.0 ? -std::log(pt.p_hat) : kInf;
    row.ratio = row.i_kt > 0.0 ? row.neg_log_phat / row.i_kt : kInf;
    row.censored = pt.exceedances < 100;
    row.lower_bound =
        lower_bound(kernel, model, n, t, opts.lower_prefactor).value;
    auto rv = resolve_v(tail, n, t, opts.beta, opts.v, opts.master_seed);
    row.bound_total = evaluate_upper_bound(tail, n, t, opts.beta,
                                           rv.value).total;
    rows.push_back(row);
  }
  return rows;
}

double log_kernel_tail_oracle(const KernelSpec& kernel,
                              const DistributionModel& model, double u) {
  const double c = kernel.centering;
  const double w = u + c;
  switch (kernel.family) {
    case KernelFamily::identity:
      return std::min(0.0, log_right_any(model, w));
    case KernelFamily::maxabs: {
      if (w <= 0.0) return 0.0;
      const double lt = model.log_true_tail(w);
      if (lt == -kInf) return -kInf;
      // P(max > w) = 1 - (1 - T)^m.
      const double lpow =
          static_cast<double>(kernel.order) * log1mexp(lt);
      return log1mexp(lpow);
    }
    case KernelFamily::absdiff:
      return log_absdiff_tail(model, w);
    case KernelFamily::sqdiff:
      return w <= 0.0 ? 0.0 : log_absdiff_tail(model, std::sqrt(w));
    case KernelFamily::omegasq:
      if (model.is_signed()) {
        throw_unsupported(
            "omegasq tail oracle needs a nonnegative-support model");
      }
      return log_omegasq_tail(model, 2.0 * w + 1.0);
    case KernelFamily::product: {
      if (!model.is_signed()) return log_product_tail(model, w);
      const DistributionModel base = magnitude_model(model);
      // Signs are independent of magnitudes: same signs with prob 1/2.
      if (w < 0.0) {
        const double miss = 0.5 * std::exp(log_product_tail(base, -w));
        return std::log(1.0 - miss);
      }
      if (w == 0.0) return std::log(0.5);
      return std::log(0.5) + log_product_tail(base, w);
    }
  }
  throw_domain("tail oracle: unknown kernel family");
}

bool AssumptionReport::all_ok() const {
  for (const auto& c : checks) {
    if (!c.ok) return false;
  }
  return true;
}

const AssumptionCheck* AssumptionReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

AssumptionReport check_assumptions(const KernelSpec& kernel,
                                   const DistributionModel& model,
                                   std::size_t n, double t) {
  AssumptionReport report;

  {
    AssumptionCheck chk{"centered", false, ""};
    try {
      const double raw = centering_constant(kernel, model).value;
      const double diff = std::abs(raw - kernel.centering);
      chk.ok = diff <= 1e-9 * std::max(1.0, std::abs(kernel.centering));
      chk.evidence = "E[h_raw] = " + to_shortest_string(raw) +
                     ", centering = " + to_shortest_string(kernel.centering);
    } catch (const error& e) {
      chk.evidence = e.what();
    }
    report.checks.push_back(chk);
  }

  {
    AssumptionCheck chk{"model_tail_valid", true, ""};
    std::vector<double> ratios;
    for (double target : {5.0, 10.0, 20.0, 40.0}) {
      const double ti = model.j_inverse(target);
      if (!std::isfinite(ti)) {
        chk.ok = false;
        chk.evidence = "J never reaches " + to_shortest_string(target);
        break;
      }
      const double ratio = -model.log_true_tail(ti) / model.j_value(ti);
      ratios.push_back(ratio);
      if (!(ratio >= 1.0 - 1e-9)) chk.ok = false;
    }
    if (chk.evidence.empty()) {
      chk.evidence = "-log P(|X|>t) / J(t) at J in {5,10,20,40}: " +
                     join_ratios(ratios);
    }
    report.checks.push_back(chk);
  }

  std::optional<KernelTail> tail_holder;
  std::string tail_error;
  try {
    tail_holder.emplace(kernel, model);
  } catch (const error& e) {
    tail_error = e.what();
  }
  if (!tail_holder) {
    for (const char* name :
         {"kernel_tail_valid", "subweibull_envelope", "deviation_zone"}) {
      report.checks.push_back(AssumptionCheck{name, false, tail_error});
    }
    report.checks.push_back(superlog_check(model));
    report.checks.push_back(subadditive_check(model));
    return report;
  }
  const KernelTail& tail = *tail_holder;
  {
    AssumptionCheck chk{"kernel_tail_valid", true, ""};
    {
      std::vector<double> ratios;
      for (double target : {5.0, 10.0, 20.0, 40.0}) {
        const double ui =
            monotone_inverse([&](double u) { return tail.I(u); }, target);
        if (!std::isfinite(ui)) {
          chk.ok = false;
          chk.evidence = "I never reaches " + to_shortest_string(target);
          break;
        }
        const double ratio =
            -log_kernel_tail_oracle(kernel, model, ui) / tail.I(ui);
        ratios.push_back(ratio);
        if (!(ratio >= 1.0 - 1e-6)) chk.ok = false;
      }
      if (chk.evidence.empty()) {
        chk.evidence = "-log P(h>u) / I(u) at I in {5,10,20,40}: " +
                       join_ratios(ratios);
      }
    }
    report.checks.push_back(chk);
  }

  {
    AssumptionCheck chk{"subweibull_envelope", false, ""};
    const double u1 =
        monotone_inverse([&](double u) { return tail.I(u); }, 300.0);
    const double u2 =
        monotone_inverse([&](double u) { return tail.I(u); }, 600.0);
    if (std::isfinite(u1) && std::isfinite(u2) && u2 > u1) {
      const double alpha_fit = (std::log(u2) - std::log(u1)) /
                               (std::log(tail.I(u2)) - std::log(tail.I(u1)));
      const double c_fit = tail.I(u2) / std::pow(u2, 1.0 / alpha_fit);
      chk.ok = tail.subweibull_available() && alpha_fit > 1.05;
      chk.evidence = "alpha_fit = " + to_shortest_string(alpha_fit) +
                     ", c_fit = " + to_shortest_string(c_fit);
      if (tail.subweibull_available()) {
        auto env = tail.envelope();
        chk.evidence += "; envelope alpha = " + to_shortest_string(env.alpha) +
                        ", c = " + to_shortest_string(env.c);
      } else {
        chk.evidence += "; no envelope";
      }
    } else {
      chk.evidence = "I never reaches 600; no stretch fit";
    }
    report.checks.push_back(chk);
  }

  {
    AssumptionCheck chk{"deviation_zone", false, ""};
    const std::uint64_t k = n / static_cast<std::size_t>(kernel.order);
    if (t > 0.0 && k >= 1) {
      const double kt = static_cast<double>(k) * t;
      const double i_kt = tail.I(kt);
      const double lhs = static_cast<double>(k) * t * t;
      chk.ok = lhs >= i_kt;
      chk.evidence = "k t^2 = " + to_shortest_string(lhs) +
                     ", I(kt) = " + to_shortest_string(i_kt);
    } else {
      chk.evidence = "needs t > 0 and n >= kernel order";
    }
    report.checks.push_back(chk);
  }

  report.checks.push_back(superlog_check(model));
  report.checks.push_back(subadditive_check(model));
  return report;
}

ProductMoments product_identity(const std::vector<double>& sample) {
  const std::size_t n = sample.size();
  if (n < 2) throw_size("product identity needs n >= 2");
  KahanSum s1, s2;
  for (double x : sample) {
    s1.add(x);
    s2.add(x * x);
  }
  const double nn = static_cast<double>(n);
  ProductMoments out;
  out.mean = s1.value() / nn;
  out.sum_squares = s2.value();
  out.u_stat = nn / (nn - 1.0) * out.mean * out.mean -
               out.sum_squares / (nn * (nn - 1.0));
  return out;
}

ProductTailComparison product_tail_bound(const DistributionModel& model,
                                         std::size_t n, double t, double beta,
                                         const VChoice& v,
                                         std::uint64_t master_seed) {
  if (!model.is_signed()) {
    throw_unsupported(
        "mean-square decomposition bound needs a symmetric (signed) model");
  }
  if (n < 2) throw_size("product tail bound needs n >= 2");
  if (!(t > 0.0)) throw_domain("product tail bound needs t > 0");
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw_domain("product tail bound needs beta in (0, 1]");
  }

  ProductTailComparison out;
  out.t_eff = std::sqrt(0.5 * t);

  const KernelSpec mean_kernel = KernelSpec::identity(0.0);
  KernelTail mean_tail(mean_kernel, model);
  const double nn = static_cast<double>(n);
  const double L = nn * out.t_eff;
  auto i2 = [&](double u) {
    return std::max(0.0, model.j_value(u) - std::log(2.0));
  };
  out.i2 = i2(L);
  auto rv = resolve_v(mean_tail, n, out.t_eff, beta, v, master_seed);
  out.v_composite = rv.value;
  const double cf = 1.0 - (beta / (2.0 * out.t_eff)) * (out.i2 / L) *
                              out.v_composite;
  const double log_g = -nn * out.t_eff * out.t_eff / (2.0 * out.v_composite);
  const double log_m = -beta * out.i2 * std::max(0.5, cf);
  const double log_u = std::log(nn) - out.i2;
  out.composite_gaussian = safe_exp(log_g);
  out.composite_intermediate = safe_exp(log_m);
  out.composite_union = safe_exp(log_u);
  out.composite_sum = out.composite_gaussian + out.composite_intermediate +
                      out.composite_union;

  const KernelSpec prod = KernelSpec::product(0.0);
  KernelTail prod_tail(prod, model);
  auto rvn = resolve_v(prod_tail, n, t, beta, v, master_seed);
  out.naive = evaluate_upper_bound(prod_tail, n, t, beta, rvn.value);
  out.naive_sum =
      out.naive.gaussian + out.naive.intermediate + out.naive.union_term;
  return out;
}

}  // namespace utail

// tail_models.cpp

#include "utail/tail_models.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "token_detail.hpp"
#include "utail/errors.hpp"
#include "utail/special.hpp"

namespace utail {

namespace {

constexpr double kLog2 = 0.6931471805599453;
constexpr double kE = 2.718281828459045;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonneg(double t, const char* what) {
  if (!(t >= 0.0)) {
    throw_domain(std::string(what) + ": argument must be >= 0");
  }
}

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {
      "exponential", "weibull",        "pareto", "lognormal",
      "loglogistic", "absnormalpower", "signed"};
  return names;
}

}  // namespace

DistributionModel DistributionModel::exponential(double rate) {
  if (!(rate > 0.0)) throw_domain("exponential: rate must be > 0");
  return DistributionModel(ModelFamily::exponential, rate, 0.0);
}

DistributionModel DistributionModel::weibull(double scale, double shape) {
  if (!(scale > 0.0)) throw_domain("weibull: scale must be > 0");
  if (!(shape > 0.0)) throw_domain("weibull: shape must be > 0");
  if (shape > 1.0) {
    throw_domain("weibull: shape must be <= 1 (heavy-tailed regime)");
  }
  return DistributionModel(ModelFamily::weibull, scale, shape);
}

DistributionModel DistributionModel::pareto(double xm, double alpha) {
  if (!(xm > 0.0)) throw_domain("pareto: xm must be > 0");
  if (!(alpha > 2.0)) throw_domain("pareto: alpha must be > 2");
  return DistributionModel(ModelFamily::pareto, xm, alpha);
}

DistributionModel DistributionModel::lognormal() {
  return DistributionModel(ModelFamily::lognormal, 0.0, 0.0);
}

DistributionModel DistributionModel::loglogistic(double scale, double shape) {
  if (!(scale > 0.0)) throw_domain("loglogistic: scale must be > 0");
  if (!(shape > 2.0)) throw_domain("loglogistic: shape must be > 2");
  return DistributionModel(ModelFamily::loglogistic, scale, shape);
}

DistributionModel DistributionModel::absnormalpower(double a) {
  if (!(a >= 2.0)) throw_domain("absnormalpower: exponent must be >= 2");
  return DistributionModel(ModelFamily::absnormalpower, a, 0.0);
}

DistributionModel DistributionModel::make_signed(DistributionModel base) {
  if (base.signed_) throw_config("signed: base model is already signed");
  base.signed_ = true;
  return base;
}

double DistributionModel::j_raw(double t) const {
  switch (family_) {
    case ModelFamily::exponential:
      return p1_ * t;
    case ModelFamily::weibull:
      return std::pow(t / p1_, p2_);
    case ModelFamily::pareto:
      // Concavified: tangent extension below xm with slope alpha/xm.
      if (t >= p1_) return p2_ * std::log(t / p1_);
      return p2_ * (t - p1_) / p1_;
    case ModelFamily::lognormal: {
      // Linear approximation at t = e below e, Chernoff form above.
      if (t <= kE) return t / kE - 0.5;
      double lt = std::log(t);
      return 0.5 * lt * lt;
    }
    case ModelFamily::loglogistic: {
      double le = p2_ * std::log(t / p1_);
      if (le > exp_arg_guard) return le;
      return std::log1p(std::pow(t / p1_, p2_));
    }
    case ModelFamily::absnormalpower:
      return 0.5 * std::pow(t, 2.0 / p1_) - kLog2;
  }
  return 0.0;
}

double DistributionModel::j_value(double t) const {
  require_nonneg(t, "j_value");
  if (t == 0.0) return 0.0;
  return std::max(0.0, j_raw(t));
}

double DistributionModel::j_inverse(double y) const {
  require_nonneg(y, "j_inverse");
  if (y == 0.0) return 0.0;
  switch (family_) {
    case ModelFamily::exponential:
      return y / p1_;
    case ModelFamily::weibull:
      return p1_ * std::pow(y, 1.0 / p2_);
    case ModelFamily::pareto: {
      double e = y / p2_;
      if (e > exp_arg_guard) return kInf;
      return p1_ * std::exp(e);
    }
    case ModelFamily::lognormal: {
      if (y <= 0.5) return kE * (y + 0.5);
      double r = std::sqrt(2.0 * y);
      if (r > exp_arg_guard) return kInf;
      return std::exp(r);
    }
    case ModelFamily::loglogistic: {
      double e = y / p2_;
      if (e > exp_arg_guard) return kInf;
      if (y > 36.0) return p1_ * std::exp(e);
      return p1_ * std::pow(std::expm1(y), 1.0 / p2_);
    }
    case ModelFamily::absnormalpower:
      return std::pow(2.0 * (y + kLog2), p1_ / 2.0);
  }
  return 0.0;
}

double DistributionModel::subadditivity_shift() const {
  switch (family_) {
    case ModelFamily::exponential:
      return 0.0;
    case ModelFamily::weibull:
      return 0.0;
    case ModelFamily::pareto:
      return p2_;  // -J_raw(0) for the tangent extension
    case ModelFamily::lognormal:
      return 0.5;
    case ModelFamily::loglogistic:
      return p2_ * kLog2;
    case ModelFamily::absnormalpower:
      return kLog2;
  }
  return 0.0;
}

double DistributionModel::true_tail(double t) const {
  require_nonneg(t, "true_tail");
  return std::exp(log_true_tail(t));
}

double DistributionModel::log_true_tail(double t) const {
  require_nonneg(t, "log_true_tail");
  switch (family_) {
    case ModelFamily::exponential:
      return -p1_ * t;
    case ModelFamily::weibull:
      return -std::pow(t / p1_, p2_);
    case ModelFamily::pareto:
      if (t <= p1_) return 0.0;
      return -p2_ * std::log(t / p1_);
    case ModelFamily::lognormal:
      if (t == 0.0) return 0.0;
      return log_normal_sf(std::log(t));
    case ModelFamily::loglogistic: {
      double le = p2_ * std::log(t / p1_);
      if (le > exp_arg_guard) return -le;
      return -std::log1p(std::pow(t / p1_, p2_));
    }
    case ModelFamily::absnormalpower:
      if (t == 0.0) return 0.0;
      return kLog2 + log_normal_sf(std::pow(t, 1.0 / p1_));
  }
  return 0.0;
}

double DistributionModel::right_tail(double t) const {
  require_nonneg(t, "right_tail");
  double tail = true_tail(t);
  return signed_ ? 0.5 * tail : tail;
}

double DistributionModel::log_right_tail(double t) const {
  require_nonneg(t, "log_right_tail");
  double lt = log_true_tail(t);
  return signed_ ? lt - kLog2 : lt;
}

double DistributionModel::left_tail(double s) const {
  require_nonneg(s, "left_tail");
  return signed_ ? 0.5 * true_tail(s) : 0.0;
}

double DistributionModel::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw_domain("quantile: u must be in [0,1)");
  if (signed_) {
    // Reflection around zero: mass 1/2 on each sign of the base law.
    if (u == 0.5) return 0.0;
    DistributionModel base = *this;
    base.signed_ = false;
    if (u < 0.5) {
      double w = 1.0 - 2.0 * u;
      if (w >= 1.0) return -std::numeric_limits<double>::infinity();
      return -base.quantile(w);
    }
    return base.quantile(2.0 * u - 1.0);
  }
  switch (family_) {
    case ModelFamily::exponential:
      return -std::log1p(-u) / p1_;
    case ModelFamily::weibull:
      return p1_ * std::pow(-std::log1p(-u), 1.0 / p2_);
    case ModelFamily::pareto:
      return p1_ * std::pow(1.0 - u, -1.0 / p2_);
    case ModelFamily::lognormal:
      if (u == 0.0) return 0.0;
      return std::exp(normal_quantile(u));
    case ModelFamily::loglogistic:
      if (u == 0.0) return 0.0;
      return p1_ * std::pow(u / (1.0 - u), 1.0 / p2_);
    case ModelFamily::absnormalpower:
      // Quantile of |Z|^a: monotone transform of the half-normal quantile.
      if (u == 0.0) return 0.0;
      return std::pow(normal_quantile(0.5 + 0.5 * u), p1_);
  }
  return 0.0;
}

double DistributionModel::sample(RngStream& stream) const {
  if (signed_) {
    DistributionModel base = *this;
    base.signed_ = false;
    double x = base.quantile(stream.next_uniform());
    double s = stream.next_uniform() < 0.5 ? -1.0 : 1.0;
    return s * x;
  }
  return quantile(stream.next_uniform());
}

double DistributionModel::abs_moment(int r) const {
  if (r < 1 || r > 4) throw_domain("abs_moment: r must be in {1,2,3,4}");
  double rd = static_cast<double>(r);
  switch (family_) {
    case ModelFamily::exponential:
      return boost::math::tgamma(rd + 1.0) / std::pow(p1_, rd);
    case ModelFamily::weibull:
      return std::pow(p1_, rd) * boost::math::tgamma(1.0 + rd / p2_);
    case ModelFamily::pareto:
      if (rd >= p2_) return kInf;
      return p2_ * std::pow(p1_, rd) / (p2_ - rd);
    case ModelFamily::lognormal:
      return std::exp(0.5 * rd * rd);
    case ModelFamily::loglogistic: {
      if (rd >= p2_) return kInf;
      double x = rd * 3.141592653589793 / p2_;
      return std::pow(p1_, rd) * x / std::sin(x);
    }
    case ModelFamily::absnormalpower: {
      // E|Z|^(a r) = 2^(a r / 2) Gamma((a r + 1)/2) / sqrt(pi)
      double ar = p1_ * rd;
      return std::exp(0.5 * ar * kLog2 +
                      std::lgamma(0.5 * (ar + 1.0)) -
                      0.5723649429247001);  // log sqrt(pi)
    }
  }
  return 0.0;
}

double DistributionModel::mean() const {
  return signed_ ? 0.0 : abs_moment(1);
}

double DistributionModel::variance() const {
  double m2 = abs_moment(2);
  if (std::isinf(m2)) return kInf;
  double mu = mean();
  return m2 - mu * mu;
}

std::optional<SubweibullParams> DistributionModel::subweibull_params() const {
  switch (family_) {
    case ModelFamily::exponential:
      return SubweibullParams{1.0, p1_};
    case ModelFamily::weibull:
      return SubweibullParams{1.0 / p2_, std::pow(p1_, -p2_)};
    case ModelFamily::absnormalpower:
      // Phi_bar(z) <= exp(-z^2/2)/2, so -log P(|X|>t) >= t^(2/a)/2 exactly.
      return SubweibullParams{p1_ / 2.0, 0.5};
    default:
      return std::nullopt;
  }
}

std::optional<double> DistributionModel::polynomial_gamma() const {
  switch (family_) {
    case ModelFamily::pareto:
      return p2_;
    case ModelFamily::loglogistic:
      return p2_;
    default:
      return std::nullopt;
  }
}

double DistributionModel::max_j_scale() const {
  return j_value(1e290);
}

DistributionModel DistributionModel::parse(std::string_view token) {
  const std::string ctx = "model";
  auto braced = detail::split_braced(token, ctx);
  if (braced.name == "signed") {
    if (!braced.has_braces || detail::trim(braced.body).empty()) {
      throw_config("model: signed requires a base model, e.g. "
                   "signed{weibull{scale=1,shape=0.5}}");
    }
    return make_signed(parse(braced.body));
  }

  auto kv = braced.has_braces
                ? detail::split_kv(braced.body, ctx)
                : std::vector<std::pair<std::string, std::string>>{};
  auto get = [&](const char* key) -> double {
    for (auto& [k, v] : kv) {
      if (k == key) return detail::parse_double_exact(v, ctx);
    }
    throw_config("model: " + braced.name + " requires parameter '" + key +
                 "'");
  };
  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (auto& [k, v] : kv) {
      bool ok = false;
      for (const char* a : allowed) {
        if (k == a) ok = true;
      }
      if (!ok) {
        std::vector<std::string> names(allowed.begin(), allowed.end());
        throw_config(detail::with_suggestions(
            "model: unknown parameter '" + k + "' for " + braced.name, k,
            names));
      }
    }
  };

  try {
    if (braced.name == "exponential") {
      check_keys({"rate"});
      return exponential(get("rate"));
    }
    if (braced.name == "weibull") {
      check_keys({"scale", "shape"});
      return weibull(get("scale"), get("shape"));
    }
    if (braced.name == "pareto") {
      check_keys({"xm", "alpha"});
      return pareto(get("xm"), get("alpha"));
    }
    if (braced.name == "lognormal") {
      if (!kv.empty()) throw_config("model: lognormal takes no parameters");
      return lognormal();
    }
    if (braced.name == "loglogistic") {
      check_keys({"scale", "shape"});
      return loglogistic(get("scale"), get("shape"));
    }
    if (braced.name == "absnormalpower") {
      check_keys({"a"});
      return absnormalpower(get("a"));
    }
  } catch (const error& e) {
    if (e.kind() == errc::domain) throw_config(std::string("model: ") + e.what());
    throw;
  }
  throw_config(detail::with_suggestions(
      "model: unknown family '" + braced.name + "'", braced.name,
      family_names()));
}

std::string DistributionModel::token() const {
  std::string base;
  switch (family_) {
    case ModelFamily::exponential:
      base = "exponential{rate=" + to_shortest_string(p1_) + "}";
      break;
    case ModelFamily::weibull:
      base = "weibull{scale=" + to_shortest_string(p1_) +
             ",shape=" + to_shortest_string(p2_) + "}";
      break;
    case ModelFamily::pareto:
      base = "pareto{xm=" + to_shortest_string(p1_) +
             ",alpha=" + to_shortest_string(p2_) + "}";
      break;
    case ModelFamily::lognormal:
      base = "lognormal";
      break;
    case ModelFamily::loglogistic:
      base = "loglogistic{scale=" + to_shortest_string(p1_) +
             ",shape=" + to_shortest_string(p2_) + "}";
      break;
    case ModelFamily::absnormalpower:
      base = "absnormalpower{a=" + to_shortest_string(p1_) + "}";
      break;
  }
  return signed_ ? "signed{" + base + "}" : base;
}

std::string DistributionModel::describe() const {
  std::string d;
  switch (family_) {
    case ModelFamily::exponential:
      d = "Exponential: J(t) = rate*t, b = 0";
      break;
    case ModelFamily::weibull:
      d = "Weibull (shape <= 1): J(t) = (t/scale)^shape, b = 0";
      break;
    case ModelFamily::pareto:
      d = "Pareto: J(t) = alpha*log(t/xm) above xm (tangent below), b = alpha";
      break;
    case ModelFamily::lognormal:
      d = "LogNormal (standard): J(t) = log(t)^2/2 above e (linear below), "
          "b = 1/2";
      break;
    case ModelFamily::loglogistic:
      d = "LogLogistic: J(t) = log(1+(t/scale)^shape), b = shape*log 2";
      break;
    case ModelFamily::absnormalpower:
      d = "|N(0,1)|^a: J(t) = t^(2/a)/2 - log 2 floored at 0, b = log 2";
      break;
  }
  if (signed_) d += "; symmetrized around 0 (Rademacher sign)";
  return d;
}

DistributionModel magnitude_model(const DistributionModel& model) {
  if (!model.is_signed()) return model;
  switch (model.family()) {
    case ModelFamily::exponential:
      return DistributionModel::exponential(model.param1());
    case ModelFamily::weibull:
      return DistributionModel::weibull(model.param1(), model.param2());
    case ModelFamily::pareto:
      return DistributionModel::pareto(model.param1(), model.param2());
    case ModelFamily::lognormal:
      return DistributionModel::lognormal();
    case ModelFamily::loglogistic:
      return DistributionModel::loglogistic(model.param1(), model.param2());
    case ModelFamily::absnormalpower:
      return DistributionModel::absnormalpower(model.param1());
  }
  throw_domain("magnitude_model: unknown family");
}

const std::vector<ModelCatalogEntry>& model_catalog() {
  static const std::vector<ModelCatalogEntry> entries = {
      {"exponential{rate=<r>}", "rate > 0"},
      {"weibull{scale=<l>,shape=<s>}", "scale > 0, shape in (0,1]"},
      {"pareto{xm=<x>,alpha=<a>}", "xm > 0, alpha > 2"},
      {"lognormal", "standard log-normal, no parameters"},
      {"loglogistic{scale=<l>,shape=<b>}", "scale > 0, shape > 2"},
      {"absnormalpower{a=<a>}", "|N(0,1)|^a, a >= 2"},
      {"signed{<model>}", "symmetrized variant of a base model"},
  };
  return entries;
}

}  // namespace utail

#include "null_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "errors.hpp"

namespace cksd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    fail(ErrorCode::param_domain,
         std::string(name) + " must be a positive finite number, got " +
             format_param(v));
  }
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::exponential: return "exponential";
    case Family::weibull: return "weibull";
    case Family::periodic: return "periodic";
    case Family::uniform: return "uniform";
    case Family::custom: return "custom";
  }
  return "unknown";
}

struct NullModel::Impl {
  Family family = Family::custom;
  std::string description;
  ModelFunctions f;
  HazardAtZero hazard0{true, 0.0};
};

NullModel::NullModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

double NullModel::density(double x) const { return impl_->f.density(x); }
double NullModel::survival(double x) const { return impl_->f.survival(x); }
double NullModel::cdf(double x) const { return impl_->f.cdf(x); }
double NullModel::hazard(double x) const { return impl_->f.hazard(x); }
double NullModel::hazard_deriv(double x) const { return impl_->f.hazard_deriv(x); }
double NullModel::cum_hazard(double x) const { return impl_->f.cum_hazard(x); }
Family NullModel::family() const { return impl_->family; }
const std::string& NullModel::description() const { return impl_->description; }
NullModel::HazardAtZero NullModel::hazard_at_zero() const { return impl_->hazard0; }

double NullModel::invert_cum_hazard(double target) const {
  if (!(target >= 0.0) || !std::isfinite(target)) {
    fail(ErrorCode::param_domain, "cumulative-hazard target must be finite and >= 0");
  }
  if (target == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  int growth = 0;
  while (impl_->f.cum_hazard(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++growth > 200) {
      fail(ErrorCode::numeric, "cumulative hazard never reaches target " +
                                   format_param(target));
    }
  }
  for (int step = 0; step < 200; ++step) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-10) return mid;
    if (impl_->f.cum_hazard(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (hi - lo > 1e-6) {
    fail(ErrorCode::numeric, "cumulative-hazard inversion did not converge");
  }
  return 0.5 * (lo + hi);
}

double NullModel::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) {
    fail(ErrorCode::param_domain, "quantile level must lie in (0,1)");
  }
  if (impl_->f.quantile) return impl_->f.quantile(q);
  return invert_cum_hazard(-std::log1p(-q));
}

namespace {

// Central finite difference of the hazard, with the step shrunk near 0 so
// the stencil stays inside the support and well-scaled for steep hazards.
bool hazard_deriv_matches(const NullModel& m, double x) {
  double h0 = std::min(1e-5 * std::max(1.0, x), x / 1000.0);
  double analytic = m.hazard_deriv(x);
  for (double h = h0; h >= h0 / 100.0; h /= 10.0) {
    double fd = (m.hazard(x + h) - m.hazard(x - h)) / (2.0 * h);
    double tol = 1e-5 * std::max(std::abs(analytic), std::abs(fd)) +
                 1e-6 * (1.0 + std::abs(m.hazard(x)));
    if (std::isfinite(fd) && std::abs(analytic - fd) <= tol) return true;
  }
  return false;
}

void validate_coherence(const NullModel& m) {
  auto complain = [&](double x, const std::string& what) {
    fail(ErrorCode::model_coherence, "model '" + m.description() + "' failed " +
                                         what + " near x=" + format_param(x));
  };

  double f0_at_zero = m.cdf(0.0);
  if (!(std::abs(f0_at_zero) <= 1e-12)) complain(0.0, "F(0)=0");

  double lo = m.quantile(0.005);
  double hi = m.quantile(0.995);
  if (!(hi > 0.0) || !std::isfinite(hi)) complain(hi, "finite 0.995 quantile");
  lo = std::max(lo, hi * 1e-12);

  const int kPoints = 200;
  double log_lo = std::log(lo), log_hi = std::log(hi);
  double prev_cdf = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    double x = std::exp(log_lo + (log_hi - log_lo) * i / (kPoints - 1));
    double dens = m.density(x);
    double surv = m.survival(x);
    double cdf = m.cdf(x);
    double haz = m.hazard(x);
    double cum = m.cum_hazard(x);

    if (surv > 0.0) {
      double ratio = dens / surv;
      if (!(std::abs(haz - ratio) <=
            1e-8 * std::max({std::abs(haz), std::abs(ratio), 1e-12}))) {
        complain(x, "hazard = density/survival");
      }
    }
    double surv_from_cum = std::exp(-cum);
    if (!(std::abs(surv - surv_from_cum) <=
          1e-8 * std::max({surv, surv_from_cum, 1e-12}))) {
      complain(x, "survival = exp(-cumulative hazard)");
    }
    if (!(cdf >= prev_cdf - 1e-12)) complain(x, "nondecreasing CDF");
    prev_cdf = cdf;
    if (!(std::abs(cdf + surv - 1.0) <= 1e-8)) complain(x, "CDF + survival = 1");
    if (!hazard_deriv_matches(m, x)) complain(x, "hazard-derivative check");
  }
}

NullModel::HazardAtZero probe_hazard_at_zero(const ModelFunctions& f) {
  double at0 = f.hazard(0.0);
  if (std::isfinite(at0)) return {true, at0};
  double v4 = f.hazard(1e-4), v6 = f.hazard(1e-6), v8 = f.hazard(1e-8);
  if (std::isfinite(v4) && std::isfinite(v6) && std::isfinite(v8) &&
      std::abs(v8) <= 10.0 * std::abs(v4) + 1.0 &&
      std::abs(v6) <= 10.0 * std::abs(v4) + 1.0) {
    return {true, v8};
  }
  return {false, kInf};
}

}  // namespace

NullModel NullModel::exponential(double rate, bool trust) {
  require_positive(rate, "rate");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::exponential;
  impl->description = "exp:rate=" + format_param(rate);
  impl->f.density = [rate](double x) { return rate * std::exp(-rate * x); };
  impl->f.survival = [rate](double x) { return std::exp(-rate * x); };
  impl->f.cdf = [rate](double x) { return -std::expm1(-rate * x); };
  impl->f.hazard = [rate](double) { return rate; };
  impl->f.hazard_deriv = [](double) { return 0.0; };
  impl->f.cum_hazard = [rate](double x) { return rate * x; };
  impl->f.quantile = [rate](double q) { return -std::log1p(-q) / rate; };
  impl->hazard0 = {true, rate};
  NullModel model(impl);
  if (!trust) validate_coherence(model);
  return model;
}

NullModel NullModel::weibull(double shape, double rate, bool trust) {
  require_positive(shape, "shape");
  require_positive(rate, "rate");
  const double k = shape, r = rate;
  auto impl = std::make_shared<Impl>();
  impl->family = Family::weibull;
  impl->description =
      "weibull:shape=" + format_param(k) + ",rate=" + format_param(r);
  auto cum = [k, r](double x) { return std::pow(r * x, k); };
  auto haz = [k, r](double x) { return k * std::pow(r, k) * std::pow(x, k - 1.0); };
  impl->f.cum_hazard = cum;
  impl->f.hazard = haz;
  impl->f.hazard_deriv = [k, r](double x) {
    return k * (k - 1.0) * std::pow(r, k) * std::pow(x, k - 2.0);
  };
  impl->f.survival = [cum](double x) { return std::exp(-cum(x)); };
  impl->f.cdf = [cum](double x) { return -std::expm1(-cum(x)); };
  impl->f.density = [haz, cum](double x) { return haz(x) * std::exp(-cum(x)); };
  impl->f.quantile = [k, r](double q) {
    return std::pow(-std::log1p(-q), 1.0 / k) / r;
  };
  if (k < 1.0) {
    impl->hazard0 = {false, kInf};
  } else if (k == 1.0) {
    impl->hazard0 = {true, r};
  } else {
    impl->hazard0 = {true, 0.0};
  }
  NullModel model(impl);
  if (!trust) validate_coherence(model);
  return model;
}

NullModel NullModel::periodic(double freq, bool trust) {
  require_positive(freq, "freq");
  const double w = freq * M_PI;
  auto impl = std::make_shared<Impl>();
  impl->family = Family::periodic;
  impl->description = "periodic:freq=" + format_param(freq);
  auto cum = [w](double x) { return x - std::sin(w * x) / w; };
  auto haz = [w](double x) { return 1.0 - std::cos(w * x); };
  impl->f.cum_hazard = cum;
  impl->f.hazard = haz;
  impl->f.hazard_deriv = [w](double x) { return w * std::sin(w * x); };
  impl->f.survival = [cum](double x) { return std::exp(-cum(x)); };
  impl->f.cdf = [cum](double x) { return -std::expm1(-cum(x)); };
  impl->f.density = [haz, cum](double x) { return haz(x) * std::exp(-cum(x)); };
  impl->hazard0 = {true, 0.0};
  NullModel model(impl);
  if (!trust) validate_coherence(model);
  return model;
}

NullModel NullModel::uniform(bool trust) {
  auto impl = std::make_shared<Impl>();
  impl->family = Family::uniform;
  impl->description = "uniform";
  impl->f.density = [](double x) { return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0; };
  impl->f.survival = [](double x) {
    return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : 1.0 - x);
  };
  impl->f.cdf = [](double x) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); };
  impl->f.hazard = [](double x) { return x < 1.0 ? 1.0 / (1.0 - x) : kInf; };
  impl->f.hazard_deriv = [](double x) {
    double s = 1.0 - x;
    return x < 1.0 ? 1.0 / (s * s) : kInf;
  };
  impl->f.cum_hazard = [](double x) {
    return x < 1.0 ? -std::log1p(-x) : kInf;
  };
  impl->f.quantile = [](double q) { return q; };
  impl->hazard0 = {true, 1.0};
  NullModel model(impl);
  if (!trust) validate_coherence(model);
  return model;
}

NullModel NullModel::custom(ModelFunctions fns, std::string description) {
  if (!fns.density || !fns.survival || !fns.cdf || !fns.hazard ||
      !fns.hazard_deriv || !fns.cum_hazard) {
    fail(ErrorCode::param_domain,
         "custom model requires all six evaluators to be set");
  }
  auto impl = std::make_shared<Impl>();
  impl->family = Family::custom;
  impl->description = description.empty() ? "custom" : std::move(description);
  impl->f = std::move(fns);
  impl->hazard0 = probe_hazard_at_zero(impl->f);

  // Coherence validation is mandatory for user-supplied models.
  NullModel model(impl);
  validate_coherence(model);
  return model;
}

namespace {

double parse_number(const std::string& text, const std::string& spec) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::parse,
         "cannot parse numeric value '" + text + "' in model spec '" + spec + "'");
  }
}

}  // namespace

NullModel NullModel::parse(std::string_view spec_view, bool trust) {
  std::string spec(spec_view);
  std::string family = spec;
  std::string params;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    family = spec.substr(0, colon);
    params = spec.substr(colon + 1);
  }

  std::vector<std::pair<std::string, double>> kv;
  std::stringstream ss(params);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::parse, "expected key=value in model spec '" + spec + "'");
    }
    kv.emplace_back(item.substr(0, eq), parse_number(item.substr(eq + 1), spec));
  }
  auto take = [&](const char* key) {
    for (auto& [k, v] : kv) {
      if (k == key) return v;
    }
    fail(ErrorCode::parse, "model spec '" + spec + "' is missing parameter '" +
                               std::string(key) + "'");
  };
  auto expect_count = [&](std::size_t n) {
    if (kv.size() != n) {
      fail(ErrorCode::parse, "model spec '" + spec + "' has " +
                                 std::to_string(kv.size()) +
                                 " parameters, expected " + std::to_string(n));
    }
  };

  if (family == "exp" || family == "exponential") {
    expect_count(1);
    return exponential(take("rate"), trust);
  }
  if (family == "weibull") {
    expect_count(2);
    return weibull(take("shape"), take("rate"), trust);
  }
  if (family == "periodic") {
    expect_count(1);
    return periodic(take("freq"), trust);
  }
  if (family == "uniform") {
    expect_count(0);
    return uniform(trust);
  }
  fail(ErrorCode::unsupported_family,
       "unsupported model family '" + family + "'");
}

}  // namespace cksd

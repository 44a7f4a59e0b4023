#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace cksd {

enum class Family { exponential, weibull, periodic, uniform, custom };

std::string family_name(Family f);

// The six evaluators a model must provide. All are functions of a
// nonnegative time; quantile is optional (numeric inversion otherwise).
struct ModelFunctions {
  std::function<double(double)> density;
  std::function<double(double)> survival;
  std::function<double(double)> cdf;
  std::function<double(double)> hazard;
  std::function<double(double)> hazard_deriv;
  std::function<double(double)> cum_hazard;
  std::function<double(double)> quantile;
};

// A hypothesized null law on [0, inf) given by coherent density, survival,
// CDF, hazard, hazard derivative and cumulative hazard evaluators.
// Immutable; copies share state and are safe to use concurrently.
class NullModel {
 public:
  struct HazardAtZero {
    bool finite;
    double value;  // meaningful only when finite
  };

  // Closed-form families. Construction validates evaluator coherence on a
  // 200-point grid spanning the central 99% of the law unless trust=true.
  static NullModel exponential(double rate, bool trust = false);
  static NullModel weibull(double shape, double rate, bool trust = false);
  static NullModel periodic(double freq, bool trust = false);
  static NullModel uniform(bool trust = false);

  // User-supplied model; coherence validation is mandatory here.
  static NullModel custom(ModelFunctions fns, std::string description);

  // Spec strings: exp:rate=1 | weibull:shape=2,rate=1 | periodic:freq=3 | uniform
  static NullModel parse(std::string_view spec, bool trust = false);

  double density(double x) const;
  double survival(double x) const;
  double cdf(double x) const;
  double hazard(double x) const;
  double hazard_deriv(double x) const;
  double cum_hazard(double x) const;

  // x with cdf(x) = q, for q in (0,1).
  double quantile(double q) const;

  // x with cum_hazard(x) = target (bisection, absolute tolerance 1e-10).
  double invert_cum_hazard(double target) const;

  Family family() const;
  const std::string& description() const;
  HazardAtZero hazard_at_zero() const;

 private:
  struct Impl;
  explicit NullModel(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace cksd

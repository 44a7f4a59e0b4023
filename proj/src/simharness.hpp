#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "censored_sample.hpp"
#include "kernel.hpp"
#include "null_model.hpp"
#include "stein_gram.hpp"

namespace cksd {

// One draw from `law` given a uniform variate v in [0,1). Exponential and
// Weibull invert the CDF in closed form; other families invert the
// cumulative hazard at -log(1-v) by bracketed bisection.
double invert_survival(const NullModel& law, double v);

// n i.i.d. survival times from `law`, deterministic in the seed.
std::vector<double> sample_survival(const NullModel& law, std::size_t n,
                                    std::uint64_t seed);

// Exponential censoring rate c with P(censored) = target when survival times
// follow `law`. target = 0 means no censoring and returns 0.
double calibrate_censoring(const NullModel& law, double target);

// (T_i, D_i) with X from `law`, C exponential with the given rate
// (rate = 0: no censoring), T = min(X,C), D = 1{X <= C}.
CensoredSample generate_censored(const NullModel& law, double censor_rate,
                                 std::size_t n, std::uint64_t seed);

// E_0[h((T,D),(t,d))] for the deterministic-kernel operators (s, m, mu)
// under the null `model` with exponential censoring at `censor_rate`,
// computed by adaptive quadrature. The degenerate-kernel property predicts
// a value of 0; deviations measure implementation or model error.
double stein_identity_oracle(const NullModel& model, Operator op,
                             const Kernel& kernel, double censor_rate,
                             double probe_t, bool probe_event);

// Same integral with data generated from `data_law` instead of the null:
// E_X[h0((T,D),(t,d))]. Nonzero when data_law differs from the null.
double stein_expectation_oracle(const NullModel& model,
                                const NullModel& data_law, Operator op,
                                const Kernel& kernel, double censor_rate,
                                double probe_t, bool probe_event);

// Ten probes: model quantiles {0.1,...,0.9} with both event indicators.
std::vector<std::pair<double, bool>> default_probe_grid(const NullModel& model);

struct ExperimentSpec {
  std::string null_spec;
  std::string alt_family;
  std::string vary;                    // swept parameter name
  std::map<std::string, double> fixed; // remaining alternative parameters
  std::vector<double> grid;
  std::vector<double> censoring = {0.3};
  std::vector<int> sample_sizes = {100};
  int repetitions = 200;
  double alpha = 0.01;
  std::vector<std::string> operators;  // s, m, mu, p, lr1, lr2
  int n_bootstrap = 1000;
  std::optional<double> bandwidth;     // fixed, or median heuristic if empty
  std::uint64_t seed = 20240810;

  void validate() const;
};

// JSON schema documented in the README; throws parse errors naming the field.
ExperimentSpec parse_experiment_config(const std::string& json_text);

// Built-in experiment configurations, keyed by preset name.
const std::map<std::string, std::string>& power_presets();

struct PowerCell {
  std::string op;
  int n = 0;
  double param = 0.0;
  double censoring = 0.0;
  double alpha = 0.0;
  int rejections = 0;
  int repetitions = 0;
  std::string error;  // empty unless some repetition failed

  double rate() const;
  double standard_error() const;
};

struct PowerReport {
  std::vector<PowerCell> cells;
  std::string to_csv() const;  // header: operator,n,param,censoring,alpha,...
};

// Runs the full grid. Deterministic in spec.seed: every repetition derives
// its data and bootstrap streams from (seed, cell index, repetition index),
// so the report does not depend on the thread count.
PowerReport run_power_study(const ExperimentSpec& spec, int threads = 0);

}  // namespace cksd

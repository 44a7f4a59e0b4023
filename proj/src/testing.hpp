#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "censored_sample.hpp"
#include "null_model.hpp"
#include "stein_gram.hpp"

namespace cksd {

struct TestResult {
  Operator op = Operator::martingale;
  double statistic = 0.0;  // n * V-statistic
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  int n_bootstrap = 0;
  std::uint64_t seed = 0;
  double bandwidth = 0.0;
  std::size_t n = 0;
  std::size_t n_events = 0;
  std::vector<std::string> warnings;
};

// Mean of all gram entries; tiny negatives from roundoff (within
// 1e-10 * max|entry|) clamp to zero.
double v_statistic(const SteinGram& gram);

// (1/n^2) w' H w.
double quadratic_form_mean(const SteinGram& gram, std::span<const double> w);

struct BootstrapResult {
  double observed = 0.0;  // V-statistic of the data
  double p_value = 1.0;
  std::vector<double> replicates;
};

// Wild bootstrap with Rademacher multipliers. Replicate b draws its weights
// from a stream derived from (seed, b), so results are byte-identical for a
// fixed seed regardless of the thread count. p = (1 + #{s_b >= s_obs})/(B+1).
BootstrapResult wild_bootstrap_pvalue(const SteinGram& gram, int n_bootstrap,
                                      std::uint64_t seed, int threads = 1);

// Builds the requested gram (uniform transform first for the
// martingale-uniform operator), computes the statistic and the wild
// bootstrap p-value, and sets reject = (p < alpha).
TestResult run_test(const CensoredSample& sample, const NullModel& model,
                    Operator op, const KernelSpec& kernel, double alpha,
                    int n_bootstrap, std::uint64_t seed, int threads = 1);

enum class LogRankWeight { lr1, lr2 };  // w(t) = 1, w(t) = Y(t)

LogRankWeight parse_logrank_weight(const std::string& text);

struct LogRankResult {
  double z = 0.0;
  double p_value = 1.0;
  double score = 0.0;     // U
  double variance = 0.0;  // V
};

// One-sample weighted log-rank test of the null cumulative hazard.
// z = U/sqrt(V) with U = sum_i [w(T_i) D_i - int_0^{T_i} w dLambda0] and
// V = sum_i int_0^{T_i} w^2 dLambda0; two-sided normal p-value. For LR2 the
// integrals are evaluated exactly on the partition induced by the sorted
// distinct observed times (Y is constant between them).
LogRankResult weighted_logrank(const CensoredSample& sample,
                               const NullModel& model, LogRankWeight weight);

}  // namespace cksd

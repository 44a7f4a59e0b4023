#include "testing.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace cksd {

double v_statistic(const SteinGram& gram) {
  if (gram.n == 0) fail(ErrorCode::empty_input, "empty-input: empty gram");
  double total = 0.0;
  for (double v : gram.h) total += v;
  double s = total / (static_cast<double>(gram.n) * static_cast<double>(gram.n));
  if (s < 0.0 && -s <= 1e-10 * gram.max_abs()) s = 0.0;
  return s;
}

double quadratic_form_mean(const SteinGram& gram, std::span<const double> w) {
  const std::size_t n = gram.n;
  const double* h = gram.h.data();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = h + i * n;
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += row[j] * w[j];
    total += w[i] * dot;
  }
  return total / (static_cast<double>(n) * static_cast<double>(n));
}

BootstrapResult wild_bootstrap_pvalue(const SteinGram& gram, int n_bootstrap,
                                      std::uint64_t seed, int threads) {
  if (gram.n < 2) {
    fail(ErrorCode::param_domain,
         "wild bootstrap needs at least 2 observations, got " +
             std::to_string(gram.n));
  }
  if (n_bootstrap < 1) {
    fail(ErrorCode::param_domain, "n_bootstrap must be at least 1");
  }

  BootstrapResult result;
  result.observed = v_statistic(gram);
  result.replicates.assign(static_cast<std::size_t>(n_bootstrap), 0.0);

  parallel_for(static_cast<std::size_t>(n_bootstrap), threads,
               [&](std::size_t b) {
                 Rng rng(derive_seed(seed, b));
                 std::vector<double> w(gram.n);
                 for (double& wi : w) wi = rng.rademacher();
                 result.replicates[b] = quadratic_form_mean(gram, w);
               });

  int larger = 0;
  for (double s : result.replicates) {
    if (s >= result.observed) ++larger;
  }
  result.p_value = static_cast<double>(1 + larger) /
                   static_cast<double>(n_bootstrap + 1);
  return result;
}

TestResult run_test(const CensoredSample& sample, const NullModel& model,
                    Operator op, const KernelSpec& kernel, double alpha,
                    int n_bootstrap, std::uint64_t seed, int threads) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::param_domain, "alpha must lie in (0,1)");
  }
  if (sample.size() < 2) {
    fail(ErrorCode::param_domain,
         "wild bootstrap needs at least 2 observations, got " +
             std::to_string(sample.size()));
  }

  SteinGram gram = build_gram(sample, model, op, kernel);
  BootstrapResult boot = wild_bootstrap_pvalue(gram, n_bootstrap, seed, threads);

  TestResult r;
  r.op = op;
  r.statistic = static_cast<double>(sample.size()) * boot.observed;
  r.p_value = boot.p_value;
  r.reject = boot.p_value < alpha;
  r.alpha = alpha;
  r.n_bootstrap = n_bootstrap;
  r.seed = seed;
  r.bandwidth = gram.bandwidth;
  r.n = sample.size();
  r.n_events = sample.event_count();
  r.warnings = gram.warnings;
  return r;
}

LogRankWeight parse_logrank_weight(const std::string& text) {
  if (text == "lr1" || text == "LR1") return LogRankWeight::lr1;
  if (text == "lr2" || text == "LR2") return LogRankWeight::lr2;
  fail(ErrorCode::param_domain, "unknown log-rank weight '" + text + "'");
}

LogRankResult weighted_logrank(const CensoredSample& sample,
                               const NullModel& model, LogRankWeight weight) {
  const std::size_t n = sample.size();

  double score = 0.0;
  double variance = 0.0;

  if (weight == LogRankWeight::lr1) {
    for (std::size_t i = 0; i < n; ++i) {
      double cum = model.cum_hazard(sample.time(i));
      score += (sample.event(i) ? 1.0 : 0.0) - cum;
      variance += cum;
    }
  } else {
    // Distinct sorted times; Y(s) is constant on each (u_{k-1}, u_k].
    std::vector<double> distinct(sample.times());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    RiskFunction risk(sample);

    const std::size_t m = distinct.size();
    std::vector<double> int_w(m), int_w2(m);  // integrals up to u_k
    double prev_cum = model.cum_hazard(0.0);
    double acc1 = 0.0, acc2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      double y = static_cast<double>(risk.at(distinct[k]));
      double cum = model.cum_hazard(distinct[k]);
      double inc = cum - prev_cum;
      acc1 += y * inc;
      acc2 += y * y * inc;
      int_w[k] = acc1;
      int_w2[k] = acc2;
      prev_cum = cum;
    }

    for (std::size_t i = 0; i < n; ++i) {
      double t = sample.time(i);
      auto it = std::lower_bound(distinct.begin(), distinct.end(), t);
      std::size_t k = static_cast<std::size_t>(it - distinct.begin());
      double w_at_t = static_cast<double>(risk.at(t));
      score += (sample.event(i) ? w_at_t : 0.0) - int_w[k];
      variance += int_w2[k];
    }
  }

  if (!(variance > 0.0)) {
    fail(ErrorCode::degenerate_variance,
         "degenerate-variance: weighted log-rank variance is zero");
  }

  LogRankResult r;
  r.score = score;
  r.variance = variance;
  r.z = score / std::sqrt(variance);
  r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  return r;
}

}  // namespace cksd

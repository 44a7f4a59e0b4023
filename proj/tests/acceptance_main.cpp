// Acceptance suite: end-to-end statistical checks of the library, one
// pass/fail line per criterion. Exit code is the number of failures.
//
// Monte-Carlo bounds carry 3-sigma slack at the stated repetition counts;
// seeds are fixed so the run is reproducible.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "censored_sample.hpp"
#include "kernel.hpp"
#include "null_model.hpp"
#include "oracle_features.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "simharness.hpp"
#include "stein_gram.hpp"
#include "testing.hpp"

using namespace cksd;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %-26s %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double min_eigenvalue(const SteinGram& g) {
  Eigen::MatrixXd m(g.n, g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) m(i, j) = g.at(i, j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues()(0);
}

// Shared fixture for criteria 1 and 9: random exponential samples with
// random exponential censoring.
struct RandomSample {
  CensoredSample data;
  double bandwidth;
};

std::vector<RandomSample> criterion1_samples() {
  std::vector<RandomSample> out;
  Rng rng(811001);
  NullModel law = NullModel::exponential(1.0, /*trust=*/true);
  for (int k = 0; k < 50; ++k) {
    std::size_t n = 5 + static_cast<std::size_t>(196.0 * rng.uniform01());
    double censor_rate = 0.1 + 1.4 * rng.uniform01();
    CensoredSample s = generate_censored(law, censor_rate, n, rng.bits());
    double bw = median_heuristic(s.times());
    out.push_back(RandomSample{std::move(s), bw});
  }
  return out;
}

void criterion_1_and_9(const std::vector<RandomSample>& samples) {
  NullModel m = NullModel::exponential(1.0, true);

  double worst_rel = 0.0;
  for (const RandomSample& rs : samples) {
    Kernel k = Kernel::gaussian(rs.bandwidth);
    SteinGram gs = survival_gram(rs.data, m, k);
    SteinGram gm = martingale_gram(rs.data, m, k);
    double scale = std::max(gs.max_abs(), 1e-300);
    for (std::size_t i = 0; i < gs.h.size(); ++i) {
      worst_rel = std::max(worst_rel, std::abs(gs.h[i] - gm.h[i]) / scale);
    }
  }
  report(1, "operator coincidence", worst_rel <= 1e-12,
         "max entrywise rel diff " + fmt(worst_rel) + " (tol 1e-12)");

  double worst_eig_ratio = 0.0;  // -lambda_min / (1e-8 n max|H|), must be < 1
  for (const RandomSample& rs : samples) {
    for (Operator op : {Operator::survival, Operator::martingale,
                        Operator::martingale_uniform, Operator::proportional}) {
      SteinGram g = build_gram(rs.data, m, op, KernelSpec{});
      double floor = 1e-8 * static_cast<double>(g.n) * std::max(g.max_abs(), 1e-300);
      worst_eig_ratio = std::max(worst_eig_ratio, -min_eigenvalue(g) / floor);
    }
  }
  report(9, "gram PSD property", worst_eig_ratio < 1.0,
         "worst -eig_min relative to the 1e-8*n*max|H| floor: " +
             fmt(worst_eig_ratio));
}

void criterion_2() {
  struct Case {
    const char* spec;
  };
  double worst = 0.0;
  std::string worst_at;
  for (const char* spec :
       {"exp:rate=1", "weibull:shape=1.5,rate=1", "periodic:freq=3"}) {
    NullModel model = NullModel::parse(spec, true);
    double censor_rate = calibrate_censoring(model, 0.3);
    Kernel kernel = Kernel::gaussian(1.0);
    for (Operator op : {Operator::survival, Operator::martingale,
                        Operator::martingale_uniform}) {
      for (auto [t, ev] : default_probe_grid(model)) {
        double dev = std::abs(
            stein_identity_oracle(model, op, kernel, censor_rate, t, ev));
        if (dev > worst) {
          worst = dev;
          worst_at = std::string(spec) + "/" + operator_tag(op);
        }
      }
    }
  }
  report(2, "stein identity", worst < 1e-6,
         "max |E[h]| " + fmt(worst) + " at " + worst_at + " (tol 1e-6)");
}

ExperimentSpec base_spec() {
  ExperimentSpec spec;
  spec.null_spec = "exp:rate=1";
  spec.censoring = {0.3};
  return spec;
}

void criterion_3_and_11() {
  ExperimentSpec spec = base_spec();
  spec.alt_family = "exp";
  spec.vary = "rate";
  spec.grid = {1.0};
  spec.sample_sizes = {100};
  spec.repetitions = 500;
  spec.alpha = 0.05;
  spec.operators = {"m", "mu", "s"};
  spec.n_bootstrap = 500;
  spec.seed = 811003;
  PowerReport rep = run_power_study(spec);

  bool pass = true;
  std::string detail;
  for (const PowerCell& cell : rep.cells) {
    double rate = cell.rate();
    bool ok = cell.error.empty() && rate >= 0.02 && rate <= 0.08;
    pass = pass && ok;
    detail += cell.op + "=" + fmt(rate) + " ";
  }
  report(3, "size of test", pass, detail + "(bounds [0.02, 0.08])");

  // Log-rank sanity on the same experimental setup.
  NullModel law = NullModel::exponential(1.0, true);
  NullModel null_model = NullModel::exponential(1.0, true);
  double censor_rate = calibrate_censoring(law, 0.3);
  const int reps = 500;
  std::vector<double> z(reps);
  parallel_for(reps, 0, [&](std::size_t r) {
    CensoredSample s =
        generate_censored(law, censor_rate, 100, derive_seed(811011, r));
    z[r] = weighted_logrank(s, null_model, LogRankWeight::lr1).z;
  });
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= reps;
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= reps - 1;
  bool ok = mean >= -0.15 && mean <= 0.15 && var >= 0.7 && var <= 1.3;
  report(11, "log-rank sanity", ok,
         "LR1 z mean " + fmt(mean) + " (bounds [-0.15,0.15]), variance " +
             fmt(var) + " (bounds [0.7,1.3])");
}

void criterion_4() {
  ExperimentSpec spec = base_spec();
  spec.alt_family = "periodic";
  spec.vary = "freq";
  spec.grid = {4.0};
  spec.sample_sizes = {100};
  spec.repetitions = 200;
  spec.alpha = 0.01;
  spec.operators = {"mu"};
  spec.n_bootstrap = 1000;
  spec.seed = 811004;
  PowerReport rep = run_power_study(spec);
  double rate = rep.cells.at(0).rate();
  bool ok = rep.cells.at(0).error.empty() && rate >= 0.60 && rate <= 0.90;
  report(4, "power headline", ok,
         "mKSDu rejection rate " + fmt(rate) + " (bounds [0.60, 0.90])");
}

void criterion_5() {
  ExperimentSpec spec = base_spec();
  spec.alt_family = "weibull";
  spec.vary = "shape";
  spec.grid = {1.5};
  spec.fixed = {{"rate", 1.0}};
  spec.sample_sizes = {30, 50, 100, 200};
  spec.repetitions = 200;
  spec.alpha = 0.01;
  spec.operators = {"m"};
  spec.n_bootstrap = 1000;
  spec.seed = 811005;
  PowerReport rep = run_power_study(spec);

  bool monotone = true;
  std::string detail = "rates ";
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    const PowerCell& cell = rep.cells[i];
    detail += std::to_string(cell.n) + ":" + fmt(cell.rate()) + " ";
    if (i > 0) {
      const PowerCell& prev = rep.cells[i - 1];
      double slack = 2.0 * std::sqrt(prev.standard_error() * prev.standard_error() +
                                     cell.standard_error() * cell.standard_error());
      if (cell.rate() < prev.rate() - slack) monotone = false;
    }
  }
  double final_rate = rep.cells.back().rate();
  bool ok = monotone && final_rate > 0.9;
  report(5, "monotone power", ok,
         detail + "(nondecreasing up to 2 SE; n=200 rate > 0.9)");
}

void criterion_6() {
  ExperimentSpec spec = base_spec();
  spec.alt_family = "weibull";
  spec.vary = "rate";
  spec.grid = {0.5, 1.5};
  spec.fixed = {{"shape", 1.0}};
  spec.sample_sizes = {50};
  spec.repetitions = 200;
  spec.alpha = 0.05;
  spec.operators = {"p", "m"};
  spec.n_bootstrap = 1000;
  spec.seed = 811006;
  PowerReport rep = run_power_study(spec);

  auto rate_of = [&](const std::string& op, double param) {
    for (const PowerCell& cell : rep.cells) {
      if (cell.op == op && cell.param == param) return cell.rate();
    }
    return -1.0;
  };
  double p_low = rate_of("p", 0.5), p_high = rate_of("p", 1.5);
  double m_low = rate_of("m", 0.5);
  bool ok = p_low <= 0.12 && p_high <= 0.12 && m_low >= 0.5;
  report(6, "proportional-family null", ok,
         "pKSD r=0.5: " + fmt(p_low) + ", r=1.5: " + fmt(p_high) +
             " (<= 0.12); mKSD r=0.5: " + fmt(m_low) + " (>= 0.5)");
}

void criterion_7() {
  CensoredSample s = generate_censored(NullModel::exponential(1.0, true),
                                       3.0 / 7.0, 60, 811007);
  double bw = median_heuristic(s.times());
  Kernel k = Kernel::gaussian(bw);
  NullModel base = NullModel::exponential(1.0, true);
  NullModel scaled = NullModel::exponential(3.0, true);

  SteinGram g1 = proportional_gram(s, base, k);
  SteinGram g9 = proportional_gram(s, scaled, k);
  double scale = std::max(9.0 * g1.max_abs(), 1e-300);
  double worst = 0.0;
  for (std::size_t i = 0; i < g1.h.size(); ++i) {
    worst = std::max(worst, std::abs(g9.h[i] - 9.0 * g1.h[i]) / scale);
  }

  KernelSpec fixed{bw};
  TestResult t1 = run_test(s, base, Operator::proportional, fixed, 0.05, 500, 99);
  TestResult t9 = run_test(s, scaled, Operator::proportional, fixed, 0.05, 500, 99);
  bool ok = worst <= 1e-12 && t1.p_value == t9.p_value;
  report(7, "pKSD scale invariance", ok,
         "gram x9 rel err " + fmt(worst) + "; p-values " + fmt(t1.p_value) +
             (t1.p_value == t9.p_value ? " == " : " != ") + fmt(t9.p_value));
}

void criterion_8() {
  Rng rng(811008);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double sigma = std::exp(std::log(0.1) +
                            (std::log(5.0) - std::log(0.1)) * rng.uniform01());
    double x = 5.0 * rng.uniform01();
    double gap = (0.1 + 2.9 * rng.uniform01()) * sigma;
    double y = rng.uniform01() < 0.5 ? x + gap : std::max(0.0, x - gap);
    Kernel k = Kernel::gaussian(sigma);
    double h = 1e-5 * sigma;
    auto rel = [](double a, double b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
    };
    worst = std::max(
        worst, rel(k.d1(x, y), (k.value(x + h, y) - k.value(x - h, y)) / (2 * h)));
    worst = std::max(
        worst, rel(k.d2(x, y), (k.value(x, y + h) - k.value(x, y - h)) / (2 * h)));
    worst = std::max(
        worst, rel(k.d12(x, y), (k.d1(x, y + h) - k.d1(x, y - h)) / (2 * h)));
  }
  report(8, "derivative correctness", worst < 1e-6,
         "max rel error vs finite differences " + fmt(worst) + " (tol 1e-6)");
}

void criterion_10() {
  Rng rng(811010);
  std::vector<NullModel> models = {NullModel::exponential(1.0, true),
                                   NullModel::weibull(1.5, 1.0, true),
                                   NullModel::periodic(3.0, true)};
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + static_cast<std::size_t>(9.0 * rng.uniform01());
    std::vector<double> t(n);
    std::vector<std::uint8_t> e(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = 0.05 + 2.5 * rng.uniform01();
      e[i] = rng.uniform01() < 0.7 ? 1 : 0;
    }
    CensoredSample s(t, e);
    Kernel k = Kernel::gaussian(0.4 + 1.2 * rng.uniform01());
    const NullModel& m = models[trial % models.size()];

    auto compare = [&](const std::vector<double>& expected,
                       const std::vector<double>& got) {
      double scale = std::max(max_abs(expected), 1e-300);
      for (std::size_t i = 0; i < expected.size(); ++i) {
        worst = std::max(worst, std::abs(expected[i] - got[i]) / scale);
      }
    };
    compare(oracle::gram(oracle::Op::survival, s, m, k),
            survival_gram(s, m, k).h);
    compare(oracle::gram(oracle::Op::martingale, s, m, k),
            martingale_gram(s, m, k).h);
    compare(oracle::gram(oracle::Op::proportional, s, m, k),
            proportional_gram(s, m, k).h);
    CensoredSample u = uniform_transform(s, m);
    compare(oracle::gram(oracle::Op::martingale_uniform, u,
                         NullModel::uniform(true), k),
            martingale_uniform_gram(s, m, KernelSpec{k.bandwidth()}).h);
  }
  report(10, "brute-force oracle", worst < 1e-8,
         "max entrywise rel diff " + fmt(worst) + " (tol 1e-8)");
}

}  // namespace

int main() {
  auto start = std::chrono::steady_clock::now();

  auto samples = criterion1_samples();
  criterion_1_and_9(samples);
  criterion_2();
  criterion_3_and_11();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_10();

  auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  std::printf("%d of 11 criteria passed in %llds\n", 11 - g_failures,
              static_cast<long long>(elapsed));
  return g_failures;
}

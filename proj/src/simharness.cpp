#include "simharness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "testing.hpp"

namespace cksd {

double invert_survival(const NullModel& law, double v) {
  if (!(v >= 0.0 && v < 1.0)) {
    fail(ErrorCode::param_domain, "uniform variate must lie in [0,1)");
  }
  if (v == 0.0) return 0.0;
  switch (law.family()) {
    case Family::exponential:
    case Family::weibull:
    case Family::uniform:
      return law.quantile(v);  // closed form
    default:
      return law.invert_cum_hazard(-std::log1p(-v));
  }
}

std::vector<double> sample_survival(const NullModel& law, std::size_t n,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = invert_survival(law, rng.uniform01());
  return x;
}

double calibrate_censoring(const NullModel& law, double target) {
  if (!(target >= 0.0 && target < 1.0)) {
    fail(ErrorCode::param_domain, "censoring target must lie in [0,1)");
  }
  if (target == 0.0) return 0.0;

  // P(censored | rate c) = int_0^inf S_X(t) c e^{-ct} dt, rewritten over the
  // censoring CDF u = 1 - e^{-ct} so the quadrature runs on (0,1).
  auto censored_fraction = [&law](double c) {
    return integrate_chunked(
        [&law, c](double u) {
          if (u >= 1.0) return 0.0;
          return law.survival(-std::log1p(-u) / c);
        },
        0.0, 1.0, 1e-11, 0.125);
  };

  double hi = 1.0, lo = 1.0;
  int guard = 0;
  while (censored_fraction(hi) < target) {
    hi *= 2.0;
    if (++guard > 70) {
      fail(ErrorCode::numeric, "calibration target not bracketable from above");
    }
  }
  guard = 0;
  while (censored_fraction(lo) > target) {
    lo /= 2.0;
    if (++guard > 70) {
      fail(ErrorCode::numeric, "calibration target not bracketable from below");
    }
  }
  for (int step = 0; step < 100 && (hi - lo) > 1e-12 * hi; ++step) {
    double mid = 0.5 * (lo + hi);
    if (censored_fraction(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CensoredSample generate_censored(const NullModel& law, double censor_rate,
                                 std::size_t n, std::uint64_t seed) {
  if (censor_rate < 0.0 || !std::isfinite(censor_rate)) {
    fail(ErrorCode::param_domain, "censoring rate must be finite and >= 0");
  }
  std::vector<double> x = sample_survival(law, n, derive_seed(seed, 1));
  std::vector<std::uint8_t> events(n, 1);
  if (censor_rate > 0.0) {
    Rng rng(derive_seed(seed, 2));
    for (std::size_t i = 0; i < n; ++i) {
      double c = -std::log1p(-rng.uniform01()) / censor_rate;
      if (x[i] <= c) {
        events[i] = 1;
      } else {
        x[i] = c;
        events[i] = 0;
      }
    }
  }
  return CensoredSample(std::move(x), std::move(events));
}

namespace {

// Upper integration limit: beyond it both S_X(x) and the censoring weight
// are below 1e-14, so the truncated tail is negligible at tolerance 1e-8.
double upper_cutoff(const NullModel& law, double censor_rate) {
  double x_model = law.quantile(1.0 - 1e-14);
  if (censor_rate > 0.0) {
    double x_cens = -std::log(1e-14) / censor_rate;
    return std::min(x_model, x_cens);
  }
  return x_model;
}

double survival_phi(const NullModel& model, double t, bool event) {
  if (event) return model.hazard_deriv(t) / model.hazard(t) - model.hazard(t);
  return -model.hazard(t);
}

// E_0[h] for the survival operator with matched data law: the integrand is
// algebraically rearranged so the hazard is never divided by (phi * f0
// collapses to (lam' - lam^2) * S0), keeping it finite at hazard zeros.
double identity_oracle_survival(const NullModel& model, const Kernel& k,
                                double c, double t, bool dt) {
  auto hz = model.hazard_at_zero();
  if (!hz.finite) {
    fail(ErrorCode::boundary_condition,
         "boundary condition b) violated: hazard diverges at 0");
  }
  double lam0 = hz.value;
  if (dt && !(model.hazard(t) > 0.0)) {
    fail(ErrorCode::hazard_support, "hazard-support: probe hazard is zero");
  }
  double phi_probe = survival_phi(model, t, dt);
  double d_probe = dt ? 1.0 : 0.0;

  double constant = lam0 * (d_probe * k.d2(0.0, t) + phi_probe * k.value(0.0, t) +
                            lam0 * k.value(0.0, 0.0));
  auto g1 = [&](double x) {
    return d_probe * k.d12(x, t) + phi_probe * k.d1(x, t) + lam0 * k.d1(x, 0.0);
  };
  auto g2 = [&](double x) {
    return d_probe * k.d2(x, t) + phi_probe * k.value(x, t) + lam0 * k.value(x, 0.0);
  };

  double cut = upper_cutoff(model, c);
  double event_part = integrate_chunked(
      [&](double x) {
        double f = model.density(x);
        double s = model.survival(x);
        double lam = model.hazard(x);
        double lamd = model.hazard_deriv(x);
        double phi_f = (lamd - lam * lam) * s;  // phi(x,1) * f0(x)
        return std::exp(-c * x) * (f * (g1(x) + constant) + phi_f * g2(x));
      },
      0.0, cut);
  double censored_part = 0.0;
  if (c > 0.0) {
    censored_part = integrate_chunked(
        [&](double x) {
          double f = model.density(x);
          double s = model.survival(x);
          return c * std::exp(-c * x) * (-f * g2(x) + s * constant);
        },
        0.0, cut);
  }
  return event_part + censored_part;
}

// E_0[h] for the martingale operator with matched data law; the coefficient
// 1/lambda merges with the density into the survival function.
double identity_oracle_martingale(const NullModel& model, const Kernel& k,
                                  double c, double t, bool dt) {
  if (dt && !(model.hazard(t) > 0.0)) {
    fail(ErrorCode::hazard_support, "hazard-support: probe hazard is zero");
  }
  double a_probe = dt ? 1.0 / model.hazard(t) : 0.0;

  auto rest = [&](double x) {
    return -(a_probe * k.d2(x, t)) + k.value(x, t) - k.value(x, 0.0) +
           a_probe * k.d2(0.0, t) - k.value(0.0, t) + k.value(0.0, 0.0);
  };

  double cut = upper_cutoff(model, c);
  double event_part = integrate_chunked(
      [&](double x) {
        double f = model.density(x);
        double s = model.survival(x);
        double grad = a_probe * k.d12(x, t) - k.d1(x, t) + k.d1(x, 0.0);
        return std::exp(-c * x) * (s * grad + f * rest(x));
      },
      0.0, cut);
  double censored_part = 0.0;
  if (c > 0.0) {
    censored_part = integrate_chunked(
        [&](double x) {
          return c * std::exp(-c * x) * model.survival(x) * rest(x);
        },
        0.0, cut);
  }
  return event_part + censored_part;
}

// Martingale-uniform: data and probe transformed by F0, null is standard
// uniform. The coefficient (1-u) is bounded, so direct evaluation is safe.
double identity_oracle_martingale_uniform(const NullModel& model,
                                          const Kernel& k, double c, double t,
                                          bool dt) {
  static const NullModel unit = NullModel::uniform(/*trust=*/true);
  double u_probe = model.cdf(t);
  if (!(u_probe >= 0.0 && u_probe < 1.0)) {
    fail(ErrorCode::transform_overflow,
         "transform-overflow: probe maps outside [0,1)");
  }
  double cut = upper_cutoff(model, c);
  double event_part = integrate_chunked(
      [&](double x) {
        double u = model.cdf(x);
        if (!(u < 1.0)) return 0.0;
        return stein_h_martingale(unit, k, u, true, u_probe, dt) *
               model.density(x) * std::exp(-c * x);
      },
      0.0, cut);
  double censored_part = 0.0;
  if (c > 0.0) {
    censored_part = integrate_chunked(
        [&](double x) {
          double u = model.cdf(x);
          if (!(u < 1.0)) return 0.0;
          return stein_h_martingale(unit, k, u, false, u_probe, dt) * c *
                 std::exp(-c * x) * model.survival(x);
        },
        0.0, cut);
  }
  return event_part + censored_part;
}

}  // namespace

double stein_identity_oracle(const NullModel& model, Operator op,
                             const Kernel& kernel, double censor_rate,
                             double probe_t, bool probe_event) {
  if (censor_rate < 0.0 || !std::isfinite(censor_rate)) {
    fail(ErrorCode::param_domain, "censoring rate must be finite and >= 0");
  }
  switch (op) {
    case Operator::survival:
      return identity_oracle_survival(model, kernel, censor_rate, probe_t,
                                      probe_event);
    case Operator::martingale:
      return identity_oracle_martingale(model, kernel, censor_rate, probe_t,
                                        probe_event);
    case Operator::martingale_uniform:
      return identity_oracle_martingale_uniform(model, kernel, censor_rate,
                                                probe_t, probe_event);
    case Operator::proportional:
      fail(ErrorCode::param_domain,
           "identity check requires deterministic kernel (operators s, m, mu)");
  }
  fail(ErrorCode::param_domain, "unsupported operator");
}

double stein_expectation_oracle(const NullModel& model,
                                const NullModel& data_law, Operator op,
                                const Kernel& kernel, double censor_rate,
                                double probe_t, bool probe_event) {
  if (op == Operator::proportional) {
    fail(ErrorCode::param_domain,
         "identity check requires deterministic kernel (operators s, m, mu)");
  }
  const double c = censor_rate;
  static const NullModel unit = NullModel::uniform(/*trust=*/true);

  auto h_point = [&](double x, bool ev) {
    switch (op) {
      case Operator::survival:
        return stein_h_survival(model, kernel, x, ev, probe_t, probe_event);
      case Operator::martingale:
        return stein_h_martingale(model, kernel, x, ev, probe_t, probe_event);
      default: {
        double u = model.cdf(x);
        double u_probe = model.cdf(probe_t);
        return stein_h_martingale(unit, kernel, std::min(u, 1.0 - 1e-16), ev,
                                  u_probe, probe_event);
      }
    }
  };

  double cut = upper_cutoff(data_law, c);
  double event_part = integrate_chunked(
      [&](double x) {
        return h_point(x, true) * data_law.density(x) * std::exp(-c * x);
      },
      0.0, cut);
  double censored_part = 0.0;
  if (c > 0.0) {
    censored_part = integrate_chunked(
        [&](double x) {
          return h_point(x, false) * c * std::exp(-c * x) * data_law.survival(x);
        },
        0.0, cut);
  }
  return event_part + censored_part;
}

std::vector<std::pair<double, bool>> default_probe_grid(const NullModel& model) {
  std::vector<std::pair<double, bool>> probes;
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double t = model.quantile(q);
    probes.emplace_back(t, true);
    probes.emplace_back(t, false);
  }
  return probes;
}

void ExperimentSpec::validate() const {
  if (null_spec.empty()) fail(ErrorCode::parse, "config field 'null' is required");
  if (alt_family.empty()) {
    fail(ErrorCode::parse, "config field 'alternative.family' is required");
  }
  if (grid.empty()) fail(ErrorCode::parse, "config field 'alternative.grid' is empty");
  if (vary.empty()) fail(ErrorCode::parse, "config field 'alternative.vary' is required");
  if (operators.empty()) fail(ErrorCode::parse, "config field 'operators' is empty");
  for (double q : censoring) {
    if (!(q >= 0.0 && q < 1.0)) {
      fail(ErrorCode::parse, "config field 'censoring' values must lie in [0,1)");
    }
  }
  if (censoring.empty()) fail(ErrorCode::parse, "config field 'censoring' is empty");
  for (int n : sample_sizes) {
    if (n < 2) fail(ErrorCode::parse, "config field 'sample_sizes' values must be >= 2");
  }
  if (sample_sizes.empty()) {
    fail(ErrorCode::parse, "config field 'sample_sizes' is empty");
  }
  if (repetitions < 1) {
    fail(ErrorCode::parse, "config field 'repetitions' must be positive");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::parse, "config field 'alpha' must lie in (0,1)");
  }
  if (n_bootstrap < 1) {
    fail(ErrorCode::parse, "config field 'bootstrap' must be positive");
  }
  for (const std::string& op : operators) {
    if (op != "lr1" && op != "lr2") parse_operator(op);  // throws when unknown
  }
}

namespace {

std::string spec_string(const std::string& family,
                        const std::map<std::string, double>& params) {
  std::ostringstream os;
  os.precision(15);
  os << family;
  char sep = ':';
  for (const auto& [k, v] : params) {
    os << sep << k << '=' << v;
    sep = ',';
  }
  return os.str();
}

NullModel make_alternative(const ExperimentSpec& spec, double value) {
  std::map<std::string, double> params = spec.fixed;
  params[spec.vary] = value;
  return NullModel::parse(spec_string(spec.alt_family, params));
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

double PowerCell::rate() const {
  if (repetitions == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(rejections) / static_cast<double>(repetitions);
}

double PowerCell::standard_error() const {
  if (repetitions == 0) return std::numeric_limits<double>::quiet_NaN();
  double r = rate();
  return std::sqrt(r * (1.0 - r) / static_cast<double>(repetitions));
}

std::string PowerReport::to_csv() const {
  std::ostringstream os;
  os << "operator,n,param,censoring,alpha,rejections,reps,rate,se\n";
  for (const PowerCell& cell : cells) {
    os << cell.op << ',' << cell.n << ',' << format_double(cell.param) << ','
       << format_double(cell.censoring) << ',' << format_double(cell.alpha)
       << ',' << cell.rejections << ',' << cell.repetitions << ',';
    if (!cell.error.empty() || cell.repetitions == 0) {
      os << "NA,NA\n";
    } else {
      os << format_double(cell.rate()) << ',' << format_double(cell.standard_error())
         << '\n';
    }
  }
  return os.str();
}

PowerReport run_power_study(const ExperimentSpec& spec, int threads) {
  spec.validate();
  const NullModel null_model = NullModel::parse(spec.null_spec);

  struct DataCell {
    std::size_t n_idx, grid_idx, cens_idx;
    NullModel alternative;
    double censor_rate;
  };

  // Calibrate once per (grid point, censoring target); the rate depends on
  // the data-generating law, not on the sample size.
  std::vector<DataCell> cells;
  for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
    NullModel alt = make_alternative(spec, spec.grid[gi]);
    for (std::size_t ci = 0; ci < spec.censoring.size(); ++ci) {
      double rate = calibrate_censoring(alt, spec.censoring[ci]);
      for (std::size_t ni = 0; ni < spec.sample_sizes.size(); ++ni) {
        cells.push_back(DataCell{ni, gi, ci, alt, rate});
      }
    }
  }

  const std::size_t n_ops = spec.operators.size();
  const std::size_t reps = static_cast<std::size_t>(spec.repetitions);
  const std::size_t n_tasks = cells.size() * reps;

  // result codes: 0 = accept, 1 = reject, 2 = error
  std::vector<std::uint8_t> results(n_tasks * n_ops, 0);
  std::mutex error_mutex;
  std::map<std::size_t, std::string> error_messages;  // slot -> message

  KernelSpec kernel{spec.bandwidth};

  parallel_for(n_tasks, threads, [&](std::size_t task) {
    const std::size_t cell_idx = task / reps;
    const std::size_t rep = task % reps;
    const DataCell& cell = cells[cell_idx];
    const int n = spec.sample_sizes[cell.n_idx];

    auto record_error = [&](std::size_t op_idx, const std::string& what) {
      results[(task * n_ops) + op_idx] = 2;
      std::lock_guard<std::mutex> lock(error_mutex);
      error_messages.emplace(task * n_ops + op_idx, what);
    };

    std::uint64_t data_seed = derive_seed(spec.seed, cell_idx, rep, 0);
    std::optional<CensoredSample> sample;
    try {
      sample.emplace(generate_censored(cell.alternative, cell.censor_rate,
                                       static_cast<std::size_t>(n), data_seed));
    } catch (const std::exception& e) {
      for (std::size_t oi = 0; oi < n_ops; ++oi) record_error(oi, e.what());
      return;
    }

    for (std::size_t oi = 0; oi < n_ops; ++oi) {
      const std::string& op = spec.operators[oi];
      try {
        bool reject;
        if (op == "lr1" || op == "lr2") {
          LogRankResult lr = weighted_logrank(
              *sample, null_model,
              op == "lr1" ? LogRankWeight::lr1 : LogRankWeight::lr2);
          reject = lr.p_value < spec.alpha;
        } else {
          std::uint64_t boot_seed = derive_seed(spec.seed, cell_idx, rep, 1 + oi);
          TestResult r =
              run_test(*sample, null_model, parse_operator(op), kernel,
                       spec.alpha, spec.n_bootstrap, boot_seed, /*threads=*/1);
          reject = r.reject;
        }
        results[(task * n_ops) + oi] = reject ? 1 : 0;
      } catch (const std::exception& e) {
        record_error(oi, e.what());
      }
    }
  });

  // Deterministic aggregation: operator-major rows, then size, grid, censoring.
  PowerReport report;
  for (std::size_t oi = 0; oi < n_ops; ++oi) {
    for (std::size_t ni = 0; ni < spec.sample_sizes.size(); ++ni) {
      for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
        for (std::size_t ci = 0; ci < spec.censoring.size(); ++ci) {
          PowerCell out;
          out.op = spec.operators[oi];
          out.n = spec.sample_sizes[ni];
          out.param = spec.grid[gi];
          out.censoring = spec.censoring[ci];
          out.alpha = spec.alpha;

          for (std::size_t cell_idx = 0; cell_idx < cells.size(); ++cell_idx) {
            const DataCell& cell = cells[cell_idx];
            if (cell.n_idx != ni || cell.grid_idx != gi || cell.cens_idx != ci) {
              continue;
            }
            for (std::size_t rep = 0; rep < reps; ++rep) {
              std::size_t slot = (cell_idx * reps + rep) * n_ops + oi;
              std::uint8_t code = results[slot];
              if (code == 2) {
                if (out.error.empty()) out.error = error_messages.at(slot);
              } else {
                ++out.repetitions;
                if (code == 1) ++out.rejections;
              }
            }
          }
          report.cells.push_back(std::move(out));
        }
      }
    }
  }
  return report;
}

ExperimentSpec parse_experiment_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentSpec spec;
  try {
    spec.null_spec = doc.at("null").get<std::string>();
    const auto& alt = doc.at("alternative");
    spec.alt_family = alt.at("family").get<std::string>();
    spec.vary = alt.at("vary").get<std::string>();
    spec.grid = alt.at("grid").get<std::vector<double>>();
    if (alt.contains("fixed")) {
      for (auto it = alt.at("fixed").begin(); it != alt.at("fixed").end(); ++it) {
        spec.fixed[it.key()] = it.value().get<double>();
      }
    }
    if (doc.contains("censoring")) {
      if (doc.at("censoring").is_array()) {
        spec.censoring = doc.at("censoring").get<std::vector<double>>();
      } else {
        spec.censoring = {doc.at("censoring").get<double>()};
      }
    }
    if (doc.contains("sample_sizes")) {
      spec.sample_sizes = doc.at("sample_sizes").get<std::vector<int>>();
    }
    if (doc.contains("repetitions")) {
      spec.repetitions = doc.at("repetitions").get<int>();
    }
    if (doc.contains("alpha")) spec.alpha = doc.at("alpha").get<double>();
    spec.operators = doc.at("operators").get<std::vector<std::string>>();
    if (doc.contains("bootstrap")) {
      spec.n_bootstrap = doc.at("bootstrap").get<int>();
    }
    if (doc.contains("bandwidth") && !doc.at("bandwidth").is_string()) {
      spec.bandwidth = doc.at("bandwidth").get<double>();
    }
    if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("bad config field: ") + e.what());
  }
  spec.validate();
  return spec;
}

const std::map<std::string, std::string>& power_presets() {
  static const std::map<std::string, std::string> presets = {
      {"fig2-weibull", R"({
  "null": "exp:rate=1",
  "alternative": {"family": "weibull", "vary": "shape",
                  "grid": [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0],
                  "fixed": {"rate": 1.0}},
  "censoring": 0.3, "sample_sizes": [100], "repetitions": 200,
  "alpha": 0.01, "operators": ["m", "mu", "p", "lr1", "lr2"],
  "bootstrap": 500, "seed": 20240810
})"},
      {"fig2-periodic", R"({
  "null": "exp:rate=1",
  "alternative": {"family": "periodic", "vary": "freq",
                  "grid": [1, 2, 3, 4, 5, 6, 7, 8]},
  "censoring": 0.3, "sample_sizes": [100], "repetitions": 200,
  "alpha": 0.01, "operators": ["m", "mu", "p", "lr1", "lr2"],
  "bootstrap": 500, "seed": 20240810
})"},
      {"fig2-weibull-sizes", R"({
  "null": "exp:rate=1",
  "alternative": {"family": "weibull", "vary": "shape", "grid": [1.5],
                  "fixed": {"rate": 1.0}},
  "censoring": 0.3, "sample_sizes": [30, 50, 100, 200], "repetitions": 200,
  "alpha": 0.01, "operators": ["m", "mu", "p", "lr1", "lr2"],
  "bootstrap": 500, "seed": 20240810
})"},
      {"fig2-periodic-sizes", R"({
  "null": "exp:rate=1",
  "alternative": {"family": "periodic", "vary": "freq", "grid": [3]},
  "censoring": 0.3, "sample_sizes": [30, 50, 100, 200], "repetitions": 200,
  "alpha": 0.01, "operators": ["m", "mu", "p", "lr1", "lr2"],
  "bootstrap": 500, "seed": 20240810
})"},
      {"fig3-proportional", R"({
  "null": "exp:rate=1",
  "alternative": {"family": "weibull", "vary": "rate",
                  "grid": [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8],
                  "fixed": {"shape": 1.0}},
  "censoring": 0.3, "sample_sizes": [50], "repetitions": 200,
  "alpha": 0.05, "operators": ["p", "m", "lr1", "lr2"],
  "bootstrap": 500, "seed": 20240810
})"},
      {"appc-weibull", R"({
  "null": "exp:rate=1",
  "alternative": {"family": "weibull", "vary": "shape", "grid": [0.6, 1.4],
                  "fixed": {"rate": 1.0}},
  "censoring": [0.3, 0.5, 0.7], "sample_sizes": [30, 50, 100, 200],
  "repetitions": 200, "alpha": 0.01, "operators": ["m", "mu"],
  "bootstrap": 500, "seed": 20240810
})"},
  };
  return presets;
}

}  // namespace cksd

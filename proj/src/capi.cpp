#include "cksd/cksd.h"

#include <cstring>
#include <string>

#include "censored_sample.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "kernel.hpp"
#include "null_model.hpp"
#include "simharness.hpp"
#include "stein_gram.hpp"
#include "testing.hpp"

namespace {

thread_local std::string g_last_error;

cksd_status status_of(cksd::ErrorCode code) {
  using cksd::ErrorCode;
  switch (code) {
    case ErrorCode::param_domain: return CKSD_ERR_PARAM;
    case ErrorCode::unsupported_family: return CKSD_ERR_FAMILY;
    case ErrorCode::empty_input: return CKSD_ERR_EMPTY;
    case ErrorCode::degenerate_sample: return CKSD_ERR_DEGENERATE;
    case ErrorCode::boundary_condition: return CKSD_ERR_BOUNDARY;
    case ErrorCode::hazard_support: return CKSD_ERR_HAZARD;
    case ErrorCode::transform_overflow: return CKSD_ERR_TRANSFORM;
    case ErrorCode::degenerate_variance: return CKSD_ERR_VARIANCE;
    case ErrorCode::model_coherence: return CKSD_ERR_MODEL;
    case ErrorCode::numeric: return CKSD_ERR_NUMERIC;
    case ErrorCode::parse: return CKSD_ERR_PARSE;
    case ErrorCode::io: return CKSD_ERR_IO;
  }
  return CKSD_ERR_UNKNOWN;
}

template <typename Fn>
cksd_status guarded(Fn&& fn) {
  try {
    fn();
    return CKSD_OK;
  } catch (const cksd::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CKSD_ERR_UNKNOWN;
  }
}

cksd_status invalid_argument(const char* what) {
  g_last_error = what;
  return CKSD_ERR_PARAM;
}

void copy_string(const std::string& text, char* buf, size_t len) {
  if (!buf || len == 0) return;
  std::size_t n = std::min(text.size(), len - 1);
  std::memcpy(buf, text.data(), n);
  buf[n] = '\0';
}

}  // namespace

struct cksd_sample {
  cksd::CensoredSample data;
};

struct cksd_model {
  cksd::NullModel data;
};

struct cksd_power_report {
  std::string csv;
};

extern "C" {

const char* cksd_last_error(void) { return g_last_error.c_str(); }

const char* cksd_version(void) { return "0.1.0"; }

cksd_status cksd_sample_create(const double* times, const int* events, size_t n,
                               cksd_sample** out) {
  if (!times || !events || !out) return invalid_argument("null argument");
  return guarded([&] {
    std::vector<double> t(times, times + n);
    std::vector<std::uint8_t> e(n);
    for (size_t i = 0; i < n; ++i) e[i] = events[i] ? 1 : 0;
    *out = new cksd_sample{cksd::CensoredSample(std::move(t), std::move(e))};
  });
}

cksd_status cksd_sample_from_csv(const char* path, cksd_sample** out,
                                 char* warning_buf, size_t warning_len) {
  if (!path || !out) return invalid_argument("null argument");
  return guarded([&] {
    cksd::CsvResult r = cksd::read_censored_csv_file(path);
    std::string warnings;
    for (const std::string& w : r.warnings) {
      if (!warnings.empty()) warnings += "; ";
      warnings += w;
    }
    copy_string(warnings, warning_buf, warning_len);
    *out = new cksd_sample{std::move(r.sample)};
  });
}

void cksd_sample_free(cksd_sample* sample) { delete sample; }

size_t cksd_sample_size(const cksd_sample* sample) {
  return sample ? sample->data.size() : 0;
}

size_t cksd_sample_events(const cksd_sample* sample) {
  return sample ? sample->data.event_count() : 0;
}

cksd_status cksd_sample_get(const cksd_sample* sample, double* times,
                            int* events) {
  if (!sample || !times || !events) return invalid_argument("null argument");
  for (size_t i = 0; i < sample->data.size(); ++i) {
    times[i] = sample->data.time(i);
    events[i] = sample->data.event(i) ? 1 : 0;
  }
  return CKSD_OK;
}

cksd_status cksd_model_create(const char* spec, cksd_model** out) {
  if (!spec || !out) return invalid_argument("null argument");
  return guarded([&] { *out = new cksd_model{cksd::NullModel::parse(spec)}; });
}

void cksd_model_free(cksd_model* model) { delete model; }

const char* cksd_model_describe(const cksd_model* model) {
  return model ? model->data.description().c_str() : "";
}

cksd_status cksd_calibrate_censoring(const cksd_model* model, double target,
                                     double* rate_out) {
  if (!model || !rate_out) return invalid_argument("null argument");
  return guarded(
      [&] { *rate_out = cksd::calibrate_censoring(model->data, target); });
}

cksd_status cksd_sample_generate(const cksd_model* model, size_t n,
                                 double censor_rate, uint64_t seed,
                                 cksd_sample** out) {
  if (!model || !out) return invalid_argument("null argument");
  return guarded([&] {
    *out = new cksd_sample{
        cksd::generate_censored(model->data, censor_rate, n, seed)};
  });
}

cksd_status cksd_run_test(const cksd_sample* sample, const cksd_model* model,
                          const char* operator_tag, double bandwidth,
                          double alpha, int n_bootstrap, uint64_t seed,
                          int threads, cksd_test_result* out) {
  if (!sample || !model || !operator_tag || !out) {
    return invalid_argument("null argument");
  }
  return guarded([&] {
    cksd::KernelSpec kernel;
    if (bandwidth > 0.0) kernel.bandwidth = bandwidth;
    cksd::TestResult r =
        cksd::run_test(sample->data, model->data,
                       cksd::parse_operator(operator_tag), kernel, alpha,
                       n_bootstrap, seed, threads);
    out->statistic = r.statistic;
    out->p_value = r.p_value;
    out->reject = r.reject ? 1 : 0;
    out->alpha = r.alpha;
    out->n_bootstrap = r.n_bootstrap;
    out->seed = r.seed;
    out->bandwidth = r.bandwidth;
    out->n = r.n;
    out->n_events = r.n_events;
    copy_string(cksd::operator_tag(r.op), out->operator_tag,
                sizeof(out->operator_tag));
    std::string warning;
    for (const std::string& w : r.warnings) {
      if (!warning.empty()) warning += "; ";
      warning += w;
    }
    copy_string(warning, out->warning, sizeof(out->warning));
  });
}

cksd_status cksd_logrank(const cksd_sample* sample, const cksd_model* model,
                         const char* weight, double* z_out, double* p_out) {
  if (!sample || !model || !weight || !z_out || !p_out) {
    return invalid_argument("null argument");
  }
  return guarded([&] {
    cksd::LogRankResult r = cksd::weighted_logrank(
        sample->data, model->data, cksd::parse_logrank_weight(weight));
    *z_out = r.z;
    *p_out = r.p_value;
  });
}

cksd_status cksd_default_probes(const cksd_model* model, double* times,
                                int* events, size_t capacity, size_t* n_out) {
  if (!model || !times || !events || !n_out) {
    return invalid_argument("null argument");
  }
  return guarded([&] {
    auto probes = cksd::default_probe_grid(model->data);
    if (probes.size() > capacity) {
      cksd::fail(cksd::ErrorCode::param_domain,
                 "probe capacity too small: need " +
                     std::to_string(probes.size()));
    }
    for (size_t i = 0; i < probes.size(); ++i) {
      times[i] = probes[i].first;
      events[i] = probes[i].second ? 1 : 0;
    }
    *n_out = probes.size();
  });
}

cksd_status cksd_identity_check(const cksd_model* model,
                                const cksd_model* data_law,
                                const char* operator_tag, double censor_rate,
                                double bandwidth, const double* probe_times,
                                const int* probe_events, size_t n_probes,
                                double* deviations, size_t* n_used,
                                double* max_abs_out) {
  if (!model || !operator_tag || !max_abs_out) {
    return invalid_argument("null argument");
  }
  if (n_probes > 0 && (!probe_times || !probe_events)) {
    return invalid_argument("probe arrays are null");
  }
  return guarded([&] {
    cksd::Operator op = cksd::parse_operator(operator_tag);
    cksd::Kernel kernel = cksd::Kernel::gaussian(bandwidth > 0.0 ? bandwidth : 1.0);

    std::vector<std::pair<double, bool>> probes;
    if (n_probes == 0) {
      probes = cksd::default_probe_grid(model->data);
    } else {
      for (size_t i = 0; i < n_probes; ++i) {
        probes.emplace_back(probe_times[i], probe_events[i] != 0);
      }
    }

    double max_abs = 0.0;
    for (size_t i = 0; i < probes.size(); ++i) {
      double v;
      if (data_law) {
        v = cksd::stein_expectation_oracle(model->data, data_law->data, op,
                                           kernel, censor_rate,
                                           probes[i].first, probes[i].second);
      } else {
        v = cksd::stein_identity_oracle(model->data, op, kernel, censor_rate,
                                        probes[i].first, probes[i].second);
      }
      if (deviations) deviations[i] = v;
      max_abs = std::max(max_abs, std::abs(v));
    }
    if (n_used) *n_used = probes.size();
    *max_abs_out = max_abs;
  });
}

cksd_status cksd_power_run(const char* config_json, int threads,
                           cksd_power_report** out) {
  if (!config_json || !out) return invalid_argument("null argument");
  return guarded([&] {
    cksd::ExperimentSpec spec = cksd::parse_experiment_config(config_json);
    cksd::PowerReport report = cksd::run_power_study(spec, threads);
    *out = new cksd_power_report{report.to_csv()};
  });
}

const char* cksd_power_preset(const char* name) {
  if (!name) return nullptr;
  const auto& presets = cksd::power_presets();
  auto it = presets.find(name);
  return it == presets.end() ? nullptr : it->second.c_str();
}

const char* cksd_power_preset_names(void) {
  static const std::string names = [] {
    std::string acc;
    for (const auto& [name, cfg] : cksd::power_presets()) {
      if (!acc.empty()) acc += ",";
      acc += name;
    }
    return acc;
  }();
  return names.c_str();
}

const char* cksd_power_report_csv(const cksd_power_report* report) {
  return report ? report->csv.c_str() : "";
}

void cksd_power_report_free(cksd_power_report* report) { delete report; }

}  // extern "C"

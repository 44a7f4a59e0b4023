// Command-line front end for the cksd shared library. Subcommands:
//   test           goodness-of-fit tests on a CSV dataset
//   simulate       draw a synthetic censored dataset
//   power          rejection-rate study over a parameter grid
//   identity-check quadrature check of the Stein identity
//
// Exit codes: 0 success, 1 statistical-precondition failure (and a failed
// identity check), 2 I/O or parse failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cksd/cksd.h"

using nlohmann::json;

namespace {

int exit_code_of(cksd_status status) {
  switch (status) {
    case CKSD_OK: return 0;
    case CKSD_ERR_PARSE:
    case CKSD_ERR_IO:
    case CKSD_ERR_EMPTY: return 2;  // input-shape problems
    default: return 1;
  }
}

[[noreturn]] void die(cksd_status status) {
  std::cerr << "error: " << cksd_last_error() << "\n";
  std::exit(exit_code_of(status));
}

void check(cksd_status status) {
  if (status != CKSD_OK) die(status);
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    std::exit(2);
  }
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "' for reading\n";
    std::exit(2);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses --bandwidth: "median" (empty optional) or a positive number.
std::optional<double> parse_bandwidth(const std::string& text) {
  if (text == "median") return std::nullopt;
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size() || v <= 0.0) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    std::cerr << "error: --bandwidth must be 'median' or a positive number\n";
    std::exit(2);
  }
}

struct ModelHandle {
  cksd_model* ptr = nullptr;
  explicit ModelHandle(const std::string& spec) {
    check(cksd_model_create(spec.c_str(), &ptr));
  }
  ~ModelHandle() { cksd_model_free(ptr); }
  ModelHandle(const ModelHandle&) = delete;
  ModelHandle& operator=(const ModelHandle&) = delete;
};

struct SampleHandle {
  cksd_sample* ptr = nullptr;
  SampleHandle() = default;
  ~SampleHandle() { cksd_sample_free(ptr); }
  SampleHandle(const SampleHandle&) = delete;
  SampleHandle& operator=(const SampleHandle&) = delete;
};

bool is_logrank(const std::string& op) { return op == "lr1" || op == "lr2"; }

int run_test_command(const std::string& input, const std::string& null_spec,
                     const std::vector<std::string>& operators, double alpha,
                     int n_bootstrap, const std::string& bandwidth_text,
                     std::uint64_t seed, int threads, const std::string& output,
                     const std::string& format) {
  SampleHandle sample;
  char warnings[512] = {0};
  check(cksd_sample_from_csv(input.c_str(), &sample.ptr, warnings,
                             sizeof(warnings)));
  if (warnings[0] != '\0') std::cerr << "warning: " << warnings << "\n";

  ModelHandle model(null_spec);
  std::optional<double> bandwidth = parse_bandwidth(bandwidth_text);

  json results = json::array();
  for (const std::string& op : operators) {
    if (is_logrank(op)) {
      double z = 0.0, p = 0.0;
      check(cksd_logrank(sample.ptr, model.ptr, op.c_str(), &z, &p));
      json doc;
      doc["operator"] = op;
      doc["n"] = cksd_sample_size(sample.ptr);
      doc["n_events"] = cksd_sample_events(sample.ptr);
      doc["statistic"] = z;
      doc["p_value"] = p;
      doc["reject"] = p < alpha;
      doc["alpha"] = alpha;
      results.push_back(doc);
    } else {
      cksd_test_result r;
      check(cksd_run_test(sample.ptr, model.ptr, op.c_str(),
                          bandwidth.value_or(0.0), alpha, n_bootstrap, seed,
                          threads, &r));
      if (r.warning[0] != '\0') std::cerr << "warning: " << r.warning << "\n";
      json doc;
      doc["operator"] = r.operator_tag;
      doc["n"] = r.n;
      doc["n_events"] = r.n_events;
      doc["bandwidth"] = r.bandwidth;
      doc["statistic"] = r.statistic;
      doc["p_value"] = r.p_value;
      doc["reject"] = r.reject != 0;
      doc["alpha"] = r.alpha;
      doc["n_bootstrap"] = r.n_bootstrap;
      doc["seed"] = r.seed;
      results.push_back(doc);
    }
  }

  if (format == "csv") {
    std::ostringstream csv;
    csv << "operator,n,n_events,bandwidth,statistic,p_value,reject,alpha,"
           "n_bootstrap,seed\n";
    for (const json& doc : results) {
      csv << doc["operator"].get<std::string>() << ','
          << doc["n"].get<std::size_t>() << ','
          << doc["n_events"].get<std::size_t>() << ',';
      if (doc.contains("bandwidth")) csv << json(doc["bandwidth"]).dump();
      csv << ',' << json(doc["statistic"]).dump() << ','
          << json(doc["p_value"]).dump() << ','
          << (doc["reject"].get<bool>() ? 1 : 0) << ','
          << json(doc["alpha"]).dump() << ',';
      if (doc.contains("n_bootstrap")) csv << doc["n_bootstrap"].get<int>();
      csv << ',';
      if (doc.contains("seed")) csv << doc["seed"].get<std::uint64_t>();
      csv << '\n';
    }
    write_output(csv.str(), output);
  } else {
    json doc;
    doc["input"] = input;
    doc["null"] = null_spec;
    doc["results"] = results;
    write_output(doc.dump(2) + "\n", output);
  }
  return 0;
}

int run_simulate_command(const std::string& null_spec, std::size_t n,
                         double censoring, double censor_rate,
                         std::uint64_t seed, const std::string& output) {
  ModelHandle model(null_spec);
  double rate = censor_rate;
  if (rate < 0.0) {  // not given explicitly: calibrate to the target fraction
    check(cksd_calibrate_censoring(model.ptr, censoring, &rate));
    std::cerr << "calibrated exponential censoring rate: " << rate << "\n";
  }
  SampleHandle sample;
  check(cksd_sample_generate(model.ptr, n, rate, seed, &sample.ptr));

  std::vector<double> times(n);
  std::vector<int> events(n);
  check(cksd_sample_get(sample.ptr, times.data(), events.data()));

  std::ostringstream csv;
  csv << "time,status\n";
  csv.precision(17);
  for (std::size_t i = 0; i < n; ++i) {
    csv << times[i] << ',' << events[i] << '\n';
  }
  write_output(csv.str(), output);
  return 0;
}

int run_power_command(const std::string& config_path, const std::string& preset,
                      bool dump_config, int threads,
                      const std::string& output) {
  std::string config;
  if (!preset.empty()) {
    const char* text = cksd_power_preset(preset.c_str());
    if (!text) {
      std::cerr << "error: unknown preset '" << preset << "'; available: "
                << cksd_power_preset_names() << "\n";
      return 2;
    }
    config = text;
  } else {
    config = read_file(config_path);
  }
  if (dump_config) {
    write_output(config + "\n", output);
    return 0;
  }

  cksd_power_report* report = nullptr;
  check(cksd_power_run(config.c_str(), threads, &report));
  std::string csv = cksd_power_report_csv(report);
  cksd_power_report_free(report);
  write_output(csv, output);
  return 0;
}

int run_identity_command(const std::string& null_spec,
                         const std::string& data_spec, const std::string& op,
                         double censoring, double censor_rate, double bandwidth,
                         double tolerance, const std::string& output) {
  ModelHandle model(null_spec);
  std::optional<ModelHandle> data_law;
  if (!data_spec.empty()) data_law.emplace(data_spec);

  double rate = censor_rate;
  if (rate < 0.0) {
    const cksd_model* law = data_law ? data_law->ptr : model.ptr;
    check(cksd_calibrate_censoring(law, censoring, &rate));
  }

  double probe_times[16];
  int probe_events[16];
  size_t n_probes = 0;
  check(cksd_default_probes(model.ptr, probe_times, probe_events, 16,
                            &n_probes));

  double deviations[16];
  double max_abs = 0.0;
  check(cksd_identity_check(model.ptr, data_law ? data_law->ptr : nullptr,
                            op.c_str(), rate, bandwidth, probe_times,
                            probe_events, n_probes, deviations, nullptr,
                            &max_abs));

  bool pass = max_abs < tolerance;
  json doc;
  doc["operator"] = op;
  doc["null"] = null_spec;
  doc["data_law"] = data_spec.empty() ? null_spec : data_spec;
  doc["censoring_rate"] = rate;
  doc["bandwidth"] = bandwidth;
  doc["tolerance"] = tolerance;
  doc["max_abs_deviation"] = max_abs;
  doc["pass"] = pass;
  json probes = json::array();
  for (size_t i = 0; i < n_probes; ++i) {
    json p;
    p["t"] = probe_times[i];
    p["event"] = probe_events[i] != 0;
    p["deviation"] = deviations[i];
    probes.push_back(p);
  }
  doc["probes"] = probes;
  write_output(doc.dump(2) + "\n", output);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goodness-of-fit tests for right-censored time-to-event data"};
  app.require_subcommand(1);

  // ---- test ----
  auto* test_cmd = app.add_subcommand("test", "run tests on a CSV dataset");
  std::string input, null_spec, bandwidth_text = "median", output;
  std::string format = "json";
  std::vector<std::string> operators;
  double alpha = 0.05;
  int n_bootstrap = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  test_cmd->add_option("--input", input, "CSV file with time,status columns")
      ->required();
  test_cmd->add_option("--null", null_spec, "null model spec, e.g. exp:rate=1")
      ->required();
  test_cmd->add_option("--op", operators,
                       "operator: s|m|mu|p|lr1|lr2 (repeatable)")
      ->required();
  test_cmd->add_option("--alpha", alpha, "type-1 error level");
  test_cmd->add_option("--bootstrap", n_bootstrap, "wild bootstrap replicates");
  test_cmd->add_option("--bandwidth", bandwidth_text,
                       "'median' or a positive number");
  test_cmd->add_option("--seed", seed, "RNG seed");
  test_cmd->add_option("--threads", threads, "worker threads (0 = auto)");
  test_cmd->add_option("--output", output, "write the report here (default stdout)");
  test_cmd->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "draw a censored dataset");
  std::string sim_null, sim_output;
  std::size_t sim_n = 100;
  double sim_censoring = 0.3, sim_rate = -1.0;
  std::uint64_t sim_seed = 0;
  sim_cmd->add_option("--null", sim_null, "data-generating model spec")
      ->required();
  sim_cmd->add_option("--n", sim_n, "sample size")->required();
  sim_cmd->add_option("--censoring", sim_censoring,
                      "target censored fraction (calibrated)");
  sim_cmd->add_option("--censoring-rate", sim_rate,
                      "explicit exponential censoring rate (overrides target)");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--output", sim_output, "CSV path (default stdout)");

  // ---- power ----
  auto* power_cmd = app.add_subcommand("power", "rejection-rate study");
  std::string power_config, power_preset, power_output;
  int power_threads = 0;
  bool dump_config = false;
  auto* cfg_opt = power_cmd->add_option("--config", power_config,
                                        "experiment config (JSON)");
  auto* preset_opt =
      power_cmd->add_option("--preset", power_preset, "built-in experiment");
  cfg_opt->excludes(preset_opt);
  power_cmd->add_flag("--dump-config", dump_config,
                      "print the config instead of running it");
  power_cmd->add_option("--threads", power_threads, "worker threads (0 = auto)");
  power_cmd->add_option("--output", power_output, "CSV path (default stdout)");

  // ---- identity-check ----
  auto* id_cmd = app.add_subcommand(
      "identity-check", "quadrature check of the Stein identity");
  std::string id_null, id_data, id_op = "m", id_output;
  double id_censoring = 0.3, id_rate = -1.0, id_bandwidth = 1.0, id_tol = 1e-6;
  id_cmd->add_option("--null", id_null, "null model spec")->required();
  id_cmd->add_option("--op", id_op, "operator: s|m|mu");
  id_cmd->add_option("--data-law", id_data,
                     "integrate against this law instead of the null");
  id_cmd->add_option("--censoring", id_censoring,
                     "target censored fraction (calibrated)");
  id_cmd->add_option("--censoring-rate", id_rate,
                     "explicit exponential censoring rate");
  id_cmd->add_option("--bandwidth", id_bandwidth, "gaussian kernel bandwidth");
  id_cmd->add_option("--tol", id_tol, "pass threshold on max |deviation|");
  id_cmd->add_option("--output", id_output, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (test_cmd->parsed()) {
      return run_test_command(input, null_spec, operators, alpha, n_bootstrap,
                              bandwidth_text, seed, threads, output, format);
    }
    if (sim_cmd->parsed()) {
      return run_simulate_command(sim_null, sim_n, sim_censoring, sim_rate,
                                  sim_seed, sim_output);
    }
    if (power_cmd->parsed()) {
      if (power_config.empty() && power_preset.empty()) {
        std::cerr << "error: power needs --config or --preset\n";
        return 2;
      }
      return run_power_command(power_config, power_preset, dump_config,
                               power_threads, power_output);
    }
    if (id_cmd->parsed()) {
      return run_identity_command(id_null, id_data, id_op, id_censoring,
                                  id_rate, id_bandwidth, id_tol, id_output);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

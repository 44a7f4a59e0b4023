#include "censored_sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace cksd {

CensoredSample::CensoredSample(std::vector<double> times,
                               std::vector<std::uint8_t> events)
    : times_(std::move(times)), events_(std::move(events)) {
  if (times_.empty()) fail(ErrorCode::empty_input, "empty-input: no observations");
  if (times_.size() != events_.size()) {
    fail(ErrorCode::param_domain, "times and event indicators differ in length");
  }
  for (double t : times_) {
    if (!std::isfinite(t) || t < 0.0) {
      fail(ErrorCode::param_domain,
           "observed times must be finite and nonnegative, got " +
               std::to_string(t));
    }
  }
}

std::size_t CensoredSample::event_count() const {
  return static_cast<std::size_t>(
      std::count(events_.begin(), events_.end(), std::uint8_t{1}));
}

RiskFunction::RiskFunction(const CensoredSample& sample)
    : sorted_times_(sample.times()) {
  std::sort(sorted_times_.begin(), sorted_times_.end());
}

int RiskFunction::at(double t) const {
  auto it = std::lower_bound(sorted_times_.begin(), sorted_times_.end(), t);
  return static_cast<int>(sorted_times_.end() - it);
}

namespace {

// Distinct sorted times with per-time event counts and risk-set sizes.
struct TimeTable {
  std::vector<double> times;
  std::vector<int> events;
  std::vector<int> at_risk;
};

TimeTable tabulate(const CensoredSample& sample) {
  const std::size_t n = sample.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample.time(a) < sample.time(b);
  });

  TimeTable table;
  std::size_t i = 0;
  int remaining = static_cast<int>(n);
  while (i < n) {
    double t = sample.time(order[i]);
    int ties = 0, deaths = 0;
    while (i < n && sample.time(order[i]) == t) {
      ++ties;
      if (sample.event(order[i])) ++deaths;
      ++i;
    }
    table.times.push_back(t);
    table.events.push_back(deaths);
    table.at_risk.push_back(remaining);
    remaining -= ties;
  }
  return table;
}

}  // namespace

StepFunction kaplan_meier(const CensoredSample& sample) {
  TimeTable table = tabulate(sample);
  StepFunction s;
  s.initial = 1.0;
  double value = 1.0;
  for (std::size_t k = 0; k < table.times.size(); ++k) {
    if (table.events[k] == 0) continue;  // censoring-only times: no drop
    value *= 1.0 - static_cast<double>(table.events[k]) /
                       static_cast<double>(table.at_risk[k]);
    s.times.push_back(table.times[k]);
    s.values.push_back(value);
  }
  return s;
}

StepFunction nelson_aalen(const CensoredSample& sample) {
  TimeTable table = tabulate(sample);
  StepFunction h;
  h.initial = 0.0;
  double value = 0.0;
  for (std::size_t k = 0; k < table.times.size(); ++k) {
    if (table.events[k] == 0) continue;
    value += static_cast<double>(table.events[k]) /
             static_cast<double>(table.at_risk[k]);
    h.times.push_back(table.times[k]);
    h.values.push_back(value);
  }
  return h;
}

}  // namespace cksd

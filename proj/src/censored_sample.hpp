#pragma once

#include <cstdint>
#include <vector>

#include "step_function.hpp"

namespace cksd {

// Paired right-censored observations (T_i, D_i): T_i is the observed time,
// D_i = 1 when the event was seen, 0 when the observation was censored.
// Immutable after construction.
class CensoredSample {
 public:
  CensoredSample(std::vector<double> times, std::vector<std::uint8_t> events);

  std::size_t size() const { return times_.size(); }
  std::size_t event_count() const;

  double time(std::size_t i) const { return times_[i]; }
  bool event(std::size_t i) const { return events_[i] != 0; }

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::uint8_t>& events() const { return events_; }

 private:
  std::vector<double> times_;
  std::vector<std::uint8_t> events_;
};

// Y(t) = #{i : T_i >= t}, counted with multiplicity. Nonincreasing,
// integer-valued, Y(0) = n.
class RiskFunction {
 public:
  explicit RiskFunction(const CensoredSample& sample);

  int at(double t) const;
  std::size_t n() const { return sorted_times_.size(); }

 private:
  std::vector<double> sorted_times_;
};

// Product-limit estimator of the survival function. Drops only at event
// times; tied times are aggregated.
StepFunction kaplan_meier(const CensoredSample& sample);

// Nelson-Aalen estimator of the cumulative hazard:
// sum of d(t)/Y(t) over distinct event times t <= argument.
StepFunction nelson_aalen(const CensoredSample& sample);

}  // namespace cksd

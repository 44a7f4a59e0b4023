#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace cksd {

// Right-continuous step function: value(t) is `initial` before the first
// knot and values[k] for the largest knot time <= t. Knot times strictly
// increase.
struct StepFunction {
  double initial = 0.0;
  std::vector<double> times;
  std::vector<double> values;

  double at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return initial;
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
  }
};

}  // namespace cksd

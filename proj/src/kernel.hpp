#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

namespace cksd {

// Twice-differentiable positive-definite kernel on the half-line with exact
// partials: d1 = dK/dx, d2 = dK/dy, d12 = d2K/dxdy. Immutable and pure.
class Kernel {
 public:
  static Kernel gaussian(double bandwidth);

  // Any C^2 kernel supplied through its four evaluators.
  static Kernel custom(std::function<double(double, double)> value,
                       std::function<double(double, double)> d1,
                       std::function<double(double, double)> d2,
                       std::function<double(double, double)> d12,
                       std::string description);

  double value(double x, double y) const;
  double d1(double x, double y) const;
  double d2(double x, double y) const;
  double d12(double x, double y) const;

  // Bandwidth of the gaussian family; 0 for custom kernels.
  double bandwidth() const;
  const std::string& description() const;

 private:
  struct Impl;
  explicit Kernel(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// Median of the n(n-1)/2 pairwise absolute differences |x_i - x_j|, i < j;
// for an even count, the mean of the two central values. Zero differences
// from ties participate. Throws degenerate-sample when fewer than two points
// are given or the median itself is zero (unusable as a bandwidth).
double median_heuristic(std::span<const double> points);

}  // namespace cksd

#include "kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"

namespace cksd {

struct Kernel::Impl {
  bool is_gaussian = false;
  double sigma = 0.0;
  std::string description;
  std::function<double(double, double)> value, d1, d2, d12;
};

Kernel::Kernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Kernel Kernel::gaussian(double bandwidth) {
  if (!std::isfinite(bandwidth) || bandwidth <= 0.0) {
    fail(ErrorCode::param_domain, "gaussian bandwidth must be positive and finite");
  }
  auto impl = std::make_shared<Impl>();
  impl->is_gaussian = true;
  impl->sigma = bandwidth;
  impl->description = "gaussian";
  return Kernel(impl);
}

Kernel Kernel::custom(std::function<double(double, double)> value,
                      std::function<double(double, double)> d1,
                      std::function<double(double, double)> d2,
                      std::function<double(double, double)> d12,
                      std::string description) {
  if (!value || !d1 || !d2 || !d12) {
    fail(ErrorCode::param_domain, "custom kernel requires all four evaluators");
  }
  auto impl = std::make_shared<Impl>();
  impl->description = description.empty() ? "custom" : std::move(description);
  impl->value = std::move(value);
  impl->d1 = std::move(d1);
  impl->d2 = std::move(d2);
  impl->d12 = std::move(d12);
  return Kernel(impl);
}

double Kernel::value(double x, double y) const {
  if (impl_->is_gaussian) {
    double s = impl_->sigma, d = x - y;
    return std::exp(-(d * d) / (2.0 * s * s));
  }
  return impl_->value(x, y);
}

double Kernel::d1(double x, double y) const {
  if (impl_->is_gaussian) {
    double s2 = impl_->sigma * impl_->sigma, d = x - y;
    return -(d / s2) * std::exp(-(d * d) / (2.0 * s2));
  }
  return impl_->d1(x, y);
}

double Kernel::d2(double x, double y) const {
  if (impl_->is_gaussian) {
    double s2 = impl_->sigma * impl_->sigma, d = x - y;
    return (d / s2) * std::exp(-(d * d) / (2.0 * s2));
  }
  return impl_->d2(x, y);
}

double Kernel::d12(double x, double y) const {
  if (impl_->is_gaussian) {
    double s2 = impl_->sigma * impl_->sigma, d = x - y;
    return (1.0 / s2 - (d * d) / (s2 * s2)) * std::exp(-(d * d) / (2.0 * s2));
  }
  return impl_->d12(x, y);
}

double Kernel::bandwidth() const { return impl_->sigma; }
const std::string& Kernel::description() const { return impl_->description; }

double median_heuristic(std::span<const double> points) {
  const std::size_t n = points.size();
  if (n < 2) {
    fail(ErrorCode::degenerate_sample,
         "degenerate-sample: median heuristic needs at least two points");
  }
  std::vector<double> diffs;
  diffs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      diffs.push_back(std::abs(points[i] - points[j]));
    }
  }
  std::size_t m = diffs.size();
  auto mid = diffs.begin() + static_cast<long>(m / 2);
  std::nth_element(diffs.begin(), mid, diffs.end());
  double median = *mid;
  if (m % 2 == 0) {
    double below = *std::max_element(diffs.begin(), mid);
    median = 0.5 * (below + median);
  }
  if (!(median > 0.0)) {
    fail(ErrorCode::degenerate_sample,
         "degenerate-sample: pairwise differences give a zero bandwidth");
  }
  return median;
}

}  // namespace cksd

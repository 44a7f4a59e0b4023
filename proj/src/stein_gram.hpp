#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "censored_sample.hpp"
#include "kernel.hpp"
#include "null_model.hpp"

namespace cksd {

enum class Operator { survival, martingale, martingale_uniform, proportional };

// Canonical short tags: s, m, mu, p.
std::string operator_tag(Operator op);
Operator parse_operator(const std::string& text);

// Gaussian kernel request: a fixed bandwidth, or the median heuristic of the
// data the gram is built on (raw times, or transformed times for the
// uniform-transformed operator).
struct KernelSpec {
  std::optional<double> bandwidth;  // nullopt => median heuristic
};

// The n x n matrix H with H_ij = <xi_i, xi_j>, where xi_i is the Stein
// feature of observation i. Symmetric positive semidefinite by construction.
struct SteinGram {
  std::size_t n = 0;
  std::vector<double> h;  // row-major n*n
  Operator op = Operator::martingale;
  double bandwidth = 0.0;
  std::string model;
  std::vector<std::string> warnings;

  double at(std::size_t i, std::size_t j) const { return h[i * n + j]; }
  double max_abs() const;
};

SteinGram survival_gram(const CensoredSample& sample, const NullModel& model,
                        const Kernel& kernel);
SteinGram martingale_gram(const CensoredSample& sample, const NullModel& model,
                          const Kernel& kernel);
SteinGram proportional_gram(const CensoredSample& sample, const NullModel& model,
                            const Kernel& kernel);

// (F0(T_i), D_i): event indicators carry over unchanged. Every transformed
// time must land in [0, 1).
CensoredSample uniform_transform(const CensoredSample& sample,
                                 const NullModel& model);

// Martingale gram of the transformed data under the standard-uniform null.
// The bandwidth is recomputed on the transformed data by the median
// heuristic unless fixed in the spec.
SteinGram martingale_uniform_gram(const CensoredSample& sample,
                                  const NullModel& model,
                                  const KernelSpec& spec);

// Resolves the kernel request and dispatches on the operator.
SteinGram build_gram(const CensoredSample& sample, const NullModel& model,
                     Operator op, const KernelSpec& spec);

// Pointwise Stein kernel h((x,dx),(y,dy)) for the deterministic operators;
// used by the quadrature-based identity oracle and by tests. The gram
// builders evaluate the same expressions.
double stein_h_survival(const NullModel& model, const Kernel& kernel, double x,
                        bool event_x, double y, bool event_y);
double stein_h_martingale(const NullModel& model, const Kernel& kernel,
                          double x, bool event_x, double y, bool event_y);

}  // namespace cksd

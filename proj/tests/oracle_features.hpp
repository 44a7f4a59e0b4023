#pragma once

// Independent re-derivation of the Stein gram entries, used as a test
// oracle. Each observation's Stein feature is kept as a symbolic linear
// combination of kernel sections K(p,.) and their first-argument derivative
// sections dK(p,.); inner products then follow from bilinearity plus the
// four reproducing rules. This deliberately avoids the hand-expanded
// term-by-term formulas in the library.

#include <vector>

#include "censored_sample.hpp"
#include "kernel.hpp"
#include "null_model.hpp"

namespace oracle {

struct Feature {
  double coeff = 0.0;
  double point = 0.0;
  bool deriv = false;  // true: dK(point,.), false: K(point,.)
};

using FeatureVec = std::vector<Feature>;

inline double inner(const cksd::Kernel& k, const Feature& a, const Feature& b) {
  if (!a.deriv && !b.deriv) return a.coeff * b.coeff * k.value(a.point, b.point);
  if (a.deriv && !b.deriv) return a.coeff * b.coeff * k.d1(a.point, b.point);
  if (!a.deriv && b.deriv) return a.coeff * b.coeff * k.d1(b.point, a.point);
  return a.coeff * b.coeff * k.d12(a.point, b.point);
}

inline double gram_entry(const cksd::Kernel& k, const FeatureVec& fi,
                         const FeatureVec& fj) {
  double s = 0.0;
  for (const Feature& a : fi) {
    for (const Feature& b : fj) s += inner(k, a, b);
  }
  return s;
}

inline FeatureVec survival_features(const cksd::NullModel& m, double x,
                                    bool event) {
  double lam = m.hazard(x);
  double phi = event ? m.hazard_deriv(x) / lam - lam : -lam;
  FeatureVec f;
  if (event) f.push_back({1.0, x, true});
  f.push_back({phi, x, false});
  f.push_back({m.hazard_at_zero().value, 0.0, false});
  return f;
}

inline FeatureVec martingale_features(const cksd::NullModel& m, double x,
                                      bool event) {
  FeatureVec f;
  if (event) f.push_back({1.0 / m.hazard(x), x, true});
  f.push_back({-1.0, x, false});
  f.push_back({1.0, 0.0, false});
  return f;
}

inline FeatureVec proportional_features(const cksd::NullModel& m, double x,
                                        bool event, std::size_t n, int at_risk) {
  FeatureVec f;
  if (!event) return f;
  double w = static_cast<double>(n) / static_cast<double>(at_risk);
  f.push_back({w * m.hazard_deriv(x), x, false});
  f.push_back({w * m.hazard(x), x, true});
  return f;
}

enum class Op { survival, martingale, martingale_uniform, proportional };

// Full oracle gram for a sample; for martingale_uniform the caller passes
// the already-transformed sample and the uniform model.
inline std::vector<double> gram(Op op, const cksd::CensoredSample& sample,
                                const cksd::NullModel& model,
                                const cksd::Kernel& kernel) {
  const std::size_t n = sample.size();
  cksd::RiskFunction risk(sample);
  std::vector<FeatureVec> feats(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = sample.time(i);
    bool ev = sample.event(i);
    switch (op) {
      case Op::survival:
        feats[i] = survival_features(model, t, ev);
        break;
      case Op::martingale:
      case Op::martingale_uniform:
        feats[i] = martingale_features(model, t, ev);
        break;
      case Op::proportional:
        feats[i] = proportional_features(model, t, ev, n, risk.at(t));
        break;
    }
  }
  std::vector<double> h(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      h[i * n + j] = gram_entry(kernel, feats[i], feats[j]);
    }
  }
  return h;
}

}  // namespace oracle

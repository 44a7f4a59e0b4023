#pragma once

#include <stdexcept>
#include <string>

namespace cksd {

// Error taxonomy shared by the C++ core and the C API. The CLI maps
// parse/io to exit code 2 and everything else to exit code 1.
enum class ErrorCode {
  param_domain = 1,       // parameter outside its domain (rate <= 0, alpha, ...)
  unsupported_family = 2, // unknown model family tag
  empty_input = 3,        // no observations
  degenerate_sample = 4,  // median heuristic has no usable bandwidth
  boundary_condition = 5, // hazard does not stay bounded at 0
  hazard_support = 6,     // zero/invalid hazard at an uncensored observation
  transform_overflow = 7, // probability transform hit 1 exactly
  degenerate_variance = 8,// log-rank variance is zero
  model_coherence = 9,    // model evaluators disagree on the validation grid
  numeric = 10,           // quadrature / root finding failed to converge
  parse = 11,             // CSV, config or model-spec syntax
  io = 12,                // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace cksd

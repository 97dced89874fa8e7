#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agrotrack {

/// Failure categories shared by every module. The CLI maps these to exit codes.
enum class ErrorKind {
  domain,              // argument outside the mathematical domain
  singular_speed,      // algebraic slip formula evaluated near v_x = 0
  integration_blowup,  // plant integration produced a non-finite value
  dimension,           // matrix / sequence shape mismatch
  numerical,           // linear algebra or root finding failed
  empty_grid,          // excitation band contains no eligible line
  shape,               // record length is not a whole number of periods
  grid_type,           // analysis requires detection lines that are absent
  ill_posed,           // rank-deficient identification problem
  extraction_failed,   // no physical-parameter start converged
  structure,           // model has the wrong order for the requested operation
  simulation_unstable, // simulating an unstable model
  infeasible,          // QP constraints cannot be satisfied
  config,              // bad or unknown configuration entry
  io,                  // file could not be read or written
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace agrotrack

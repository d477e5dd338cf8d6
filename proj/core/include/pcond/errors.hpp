#pragma once

#include <stdexcept>
#include <string>

namespace pcond {

/// Failure categories, mapped to distinct process exit codes by the CLI.
enum class ErrorCategory {
  config = 2,        // bad arguments, malformed files, invalid parameters
  geometry = 3,      // degenerate domains, empty cell sets, unbounded intersections
  solver = 4,        // non-convergence, overflow, accuracy assertions
  inconclusive = 5,  // indicator classification gave no usable verdict
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail_config(const std::string& msg) { throw Error(ErrorCategory::config, msg); }
[[noreturn]] inline void fail_geometry(const std::string& msg) { throw Error(ErrorCategory::geometry, msg); }
[[noreturn]] inline void fail_solver(const std::string& msg) { throw Error(ErrorCategory::solver, msg); }
[[noreturn]] inline void fail_inconclusive(const std::string& msg) { throw Error(ErrorCategory::inconclusive, msg); }

}  // namespace pcond

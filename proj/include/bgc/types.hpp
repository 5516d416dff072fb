#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>
#include <string_view>

namespace bgc {

using Vec3 = Eigen::Vector3d;

/// Coarse classification of failures, stable across releases so that
/// command-line callers can dispatch on it.
enum class ErrorCategory {
  parse,       // malformed input text
  validation,  // well-formed input violating a model invariant
  domain,      // argument outside the mathematical domain of an operation
  numeric,     // ill-conditioned or degenerate numerical state
  mismatch,    // inputs that must agree (hashes, layouts, structure) do not
  io,          // file system failures
};

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

inline bool is_finite(const Vec3& p) { return p.allFinite(); }

}  // namespace bgc

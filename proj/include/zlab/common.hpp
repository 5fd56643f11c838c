#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace zlab {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tail exponent used by every tailed local average.
constexpr int kDec = 8;

enum class ErrorCode {
  EmptyOrFullSet,
  ScaleRangeTooNarrow,
  EmptySet,
  InvalidRatio,
  Divergent,
  UnsupportedSpace,
  ScaleUnresolvable,
  SupportViolation,
  UnresolvedSingularity,
  GridMismatch,
  NotStepFunction,
  BudgetViolation,
  NotCarleson,
  NoSingularFrequency,
  ConfigError,
  AuditFailure,
  InvalidArgument,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Real interval (a,b); endpoints may be infinite. Openness is a property of
/// the caller's convention, the struct only stores endpoints.
struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
  double center() const { return 0.5 * (a + b); }
  bool contains_open(double x) const { return a < x && x < b; }
  bool contains_halfopen(double x) const { return a <= x && x < b; }
  bool operator==(const Interval&) const = default;
};

/// Worker cap shared by all parallel loops (set from --threads).
void set_thread_count(unsigned k);
unsigned thread_count();

/// Runs body(i) for i in [0,n). Results must be written to per-index slots so
/// that the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };
LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

const char* version();

bool is_power_of_two(std::uint64_t n);

}  // namespace zlab

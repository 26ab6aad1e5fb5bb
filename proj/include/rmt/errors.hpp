#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

// Exit codes used by the CLI. These are stable API: scripts may rely on them.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitConfig = 2,     // invalid configuration, flags, or argument domains
  kExitCapacity = 3,   // enumeration/search guards tripped
  kExitIo = 4,         // filesystem failures (missing file, refusing overwrite)
  kExitMalformed = 5,  // files that exist but do not parse / lack required data
};

// Base class for all library errors. Every error carries the exit code the
// CLI should terminate with when it propagates to main().
class Error : public std::runtime_error {
 public:
  Error(const std::string& message, int exit_code)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

// Bad run configuration: trial counts below contract, mixed-direction grids,
// unknown tags, malformed flag values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(m, kExitConfig) {}
};

// Invalid values handed to a numeric kernel: wrong dimensions, indices out of
// range, non-finite entries, unsorted tuples, inconsistent moments.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(m, kExitConfig) {}
};

// A numerically singular matrix where an inverse is required.
class SingularMatrixError : public DomainError {
 public:
  explicit SingularMatrixError(const std::string& m) : DomainError(m) {}
};

// An exhaustive enumeration or search would exceed its documented guard.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& m) : Error(m, kExitCapacity) {}
};

// A capped iterative search failed to terminate; signals a numerical problem
// because the quantity searched for is provably well defined.
class NonTerminationError : public Error {
 public:
  explicit NonTerminationError(const std::string& m) : Error(m, kExitCapacity) {}
};

// Filesystem-level failure: unreadable input, unwritable output, or refusing
// to overwrite an existing file without the explicit flag.
class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(m, kExitIo) {}
};

// A file that was found and read but does not contain what it must.
class MalformedRecordError : public Error {
 public:
  explicit MalformedRecordError(const std::string& m) : Error(m, kExitMalformed) {}
};

// Fewer data points than a fit or test requires.
class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& m) : Error(m, kExitConfig) {}
};

}  // namespace rmt

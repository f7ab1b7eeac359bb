#ifndef APC_ERRORS_HPP
#define APC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace apc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Pattern generation ran out of proposal attempts (d_min too large).
class AttemptsExhausted : public Error {
 public:
  using Error::Error;
};

class PatternMismatch : public Error {
 public:
  using Error::Error;
};

class NotALatticePoint : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class RangeTooLarge : public Error {
 public:
  using Error::Error;
};

class OddSiteCount : public Error {
 public:
  using Error::Error;
};

class NotChiral : public Error {
 public:
  using Error::Error;
};

class GaplessAtZero : public Error {
 public:
  using Error::Error;
};

class SingularLocalizer : public Error {
 public:
  using Error::Error;
};

class KappaOutOfRange : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

}  // namespace apc

#endif  // APC_ERRORS_HPP

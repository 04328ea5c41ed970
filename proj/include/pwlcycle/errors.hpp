#pragma once

#include <stdexcept>
#include <string>

namespace pwlcycle {

// Base of every failure raised by the library. The CLI maps these onto exit
// codes: SewingRejected -> 2, ConfigError -> 1, everything else -> 3.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class SewingRejected : public Error {
public:
  using Error::Error;
};

class NotDefined : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public Error {
public:
  using Error::Error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

class NotApplicable : public Error {
public:
  using Error::Error;
};

class NotClosed : public Error {
public:
  using Error::Error;
};

// Two simple zeros of the displacement function survived refinement, or the
// stability cross-checks disagree. Always a numerical failure.
class UniquenessViolation : public Error {
public:
  using Error::Error;
};

} // namespace pwlcycle

#pragma once

#include <stdexcept>
#include <string>

namespace regdp {

// Base class for everything this library throws on contract violations.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

// Operand contains NaN/Inf, or a value outside its documented domain.
class InvalidValue : public Error {
public:
  using Error::Error;
};

class NonpositiveParameter : public Error {
public:
  using Error::Error;
};

class ParameterOutOfRange : public Error {
public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
public:
  using Error::Error;
};

// Right-hand side is not in the closure of the range at the given tolerance.
class NotInRange : public Error {
public:
  using Error::Error;
};

// The discrepancy equation h(a) = C*delta has no root for this data.
class NoRoot : public Error {
public:
  using Error::Error;
};

class MaxIterExceeded : public Error {
public:
  using Error::Error;
};

// Truncated series cannot certify the requested quantity at this parameter.
class TruncationInsufficient : public Error {
public:
  using Error::Error;
};

// Resampling failed to produce noisy data with ||f_delta|| > delta.
class NoiseRejection : public Error {
public:
  using Error::Error;
};

class BudgetExhausted : public Error {
public:
  using Error::Error;
};

class InvalidPlan : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace regdp

#pragma once

#include <stdexcept>
#include <string>

namespace kc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter, exponent, or scalar argument lies outside its admissible range.
class RangeError : public Error {
public:
  using Error::Error;
};

/// Coupling constant violates lambda < sqrt(V1 V2).
class CouplingError : public Error {
public:
  using Error::Error;
};

/// Two fields (or a field and an operator) live on different grids.
class GridMismatch : public Error {
public:
  using Error::Error;
};

class AllocationError : public Error {
public:
  using Error::Error;
};

/// The requested operation is not defined for the parameter regime.
class RegimeError : public Error {
public:
  using Error::Error;
};

/// The fiber polynomial has no nonlocal part, so it has no interior maximum.
class NoNonlocalMass : public Error {
public:
  using Error::Error;
};

class DegenerateInput : public Error {
public:
  using Error::Error;
};

class Overflow : public Error {
public:
  using Error::Error;
};

/// The field carries too much mass near the box boundary for a dilation.
class SupportError : public Error {
public:
  using Error::Error;
};

/// Oracle called on a grid too large for the O(n^6) direct sum.
class SizeError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace kc

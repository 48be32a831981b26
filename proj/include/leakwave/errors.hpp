#pragma once

#include <stdexcept>
#include <string>

namespace leakwave {

/// Base of every error thrown by the library. The CLI maps the concrete
/// subclasses onto exit codes (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of a physical formula (non-positive pressure, frequency, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// R2 + T2 exceeded 1 + tolerance, or a power coefficient fell below -tolerance.
class EnergyViolation : public Error {
 public:
  using Error::Error;
};

/// Zero areas or an ill-conditioned conservation system.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Generator or simulator parameters that cannot be honoured (aliasing, wrap-around, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Mismatched lengths, sample rates or frequency grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class GatingError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

class InterpolationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Solver failure at one bin of a sweep; carries the bin index.
class BinError : public DegenerateGeometry {
 public:
  BinError(std::size_t bin, const std::string& what)
      : DegenerateGeometry("bin " + std::to_string(bin) + ": " + what), bin_(bin) {}
  std::size_t bin() const noexcept { return bin_; }

 private:
  std::size_t bin_;
};

}  // namespace leakwave

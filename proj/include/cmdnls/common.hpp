#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmdnls {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

enum class ErrorKind {
  InvalidGrid,
  InvalidSymbol,
  NonRealFunctional,
  ChiralityViolation,
  Alignment,
  NumericalBreakdown,
  NotASoliton,
  DegenerateConfiguration,
  InvalidDenominator,
  DegenerateSpectrum,
  NearSpectrum,
  PositivityViolation,
  VanishingResidue,
  Stiffness,
  Arity,
  Config,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type; `kind` is the
// machine-readable category and what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cmdnls

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace tgate {

using cplx = std::complex<double>;

namespace constants {
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;    // kg
}  // namespace constants

/// Raised for invalid user input: malformed configs, out-of-range indices,
/// violated preconditions. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot deliver its contract
/// (non-convergence, instability, step-size underflow). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double hz_to_angular(double hz) { return constants::two_pi * hz; }
inline double angular_to_hz(double w) { return w / constants::two_pi; }

}  // namespace tgate

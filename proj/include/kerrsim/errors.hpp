#pragma once

#include <stdexcept>
#include <string>

namespace kerrsim {

/// Raised when a Fock cutoff cannot hold the requested state within the tail bound.
class CutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by closed-form Kerr evolution for phases outside multiples of pi/2.
class UnsupportedPhaseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A fidelity curve never dropped below one half on the scanned range.
class NoCrossingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Bell parameter does not exceed the classical bound at zero phase error.
class NoViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kerrsim

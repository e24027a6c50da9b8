#pragma once

#include <stdexcept>

namespace latrec {

// Precondition violations throw std::invalid_argument; the types below cover
// the failure modes callers may want to handle separately.

/// A size or memory guard refused the request.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No reconstructing lattice was found within the search budget.
class LatticeSearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An a-posteriori spectral certificate did not hold.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The normal-equation matrix has no usable spectrum.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace latrec

#pragma once

#include <stdexcept>
#include <string>

namespace qauth {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix shapes disagree, or a dimension exceeds the configured cap.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a mathematical precondition (non-Hermitian,
/// non-unitary, state outside the code space, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative decomposition failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

class KeyError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unsupported space layout for the requested operation.
class LayoutError : public Error {
 public:
  using Error::Error;
};

/// Tag state carries weight outside the valid-tag subspace.
class InvalidTagError : public Error {
 public:
  using Error::Error;
};

/// A unitary has an eigenphase on the branch cut of the principal logarithm.
class DegenerateBranchError : public Error {
 public:
  DegenerateBranchError(const std::string& what, double phase)
      : Error(what), phase_(phase) {}
  double phase() const { return phase_; }

 private:
  double phase_;
};

/// Family too small for the requested analysis (e.g. K = 1 for forgery).
class DegenerateFamilyError : public Error {
 public:
  using Error::Error;
};

class InsufficientFamilyError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qauth

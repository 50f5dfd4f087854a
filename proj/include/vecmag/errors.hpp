#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vecmag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failure, loss of unitarity, non-finite finite differences.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A closed-form branch that the analytic derivation does not cover (e.g. odd N for GHZ).
class UnsupportedBranch : public Error {
 public:
  using Error::Error;
};

/// Spectrum does not contain the expected number of resolvable peaks.
class UnderResolved : public Error {
 public:
  UnderResolved(const std::string& what, int found, int wanted)
      : Error(what), found_(found), wanted_(wanted) {}
  int found() const noexcept { return found_; }
  int wanted() const noexcept { return wanted_; }

 private:
  int found_;
  int wanted_;
};

/// Field outside the regime Bx > |By| + |Bz| where the six-frequency recovery applies.
class OutOfRegime : public Error {
 public:
  using Error::Error;
};

class AmbiguousSign : public Error {
 public:
  AmbiguousSign(const std::string& what, std::vector<std::string> tied)
      : Error(what), tied_(std::move(tied)) {}
  const std::vector<std::string>& tied() const noexcept { return tied_; }

 private:
  std::vector<std::string> tied_;
};

}  // namespace vecmag

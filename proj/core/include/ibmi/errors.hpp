#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibmi {

// Base for every library failure; callers that do not care about the kind
// can catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t step)
      : Error("matrix is not positive definite: non-positive pivot at step " +
              std::to_string(step)),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ZeroPivot : public Error {
 public:
  explicit ZeroPivot(std::size_t step)
      : Error("LDL^T factorization hit a zero pivot at step " + std::to_string(step)),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class InvalidHyperparameter : public Error {
 public:
  using Error::Error;
};

class NotPerfectSquare : public Error {
 public:
  using Error::Error;
};

class InvalidOverlap : public Error {
 public:
  using Error::Error;
};

class TooManyBlocks : public Error {
 public:
  using Error::Error;
};

class UncoveredIndices : public Error {
 public:
  explicit UncoveredIndices(std::vector<std::size_t> missing);
  const std::vector<std::size_t>& indices() const noexcept { return missing_; }

 private:
  std::vector<std::size_t> missing_;
};

class DuplicateWithinSet : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class OutOfMemoryBudget : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace ibmi

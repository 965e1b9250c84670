#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace bae {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A factorization or identity check failed at working precision.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Documented failure of a reconstruction method (as opposed to a bug or a
/// numerical breakdown).
class MethodFailure : public Error {
public:
  MethodFailure(std::string kind, const std::string &what)
      : Error(what), kind_(std::move(kind)) {}
  const std::string &kind() const { return kind_; }

private:
  std::string kind_;
};

class NonPositiveData : public MethodFailure {
public:
  explicit NonPositiveData(const std::string &what)
      : MethodFailure("NonPositiveData", what) {}
};

class NonPositiveModelOutput : public MethodFailure {
public:
  explicit NonPositiveModelOutput(const std::string &what)
      : MethodFailure("NonPositiveModelOutput", what) {}
};

class NonConvergence : public MethodFailure {
public:
  explicit NonConvergence(const std::string &what)
      : MethodFailure("NonConvergence", what) {}
};

} // namespace bae

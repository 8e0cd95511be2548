#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trashfire {

/// Process exit codes shared by the error taxonomy and the CLI.
///   2  schema / contract / domain violations
///   3  optimizer convergence failures
///   4  identifiability and empty-subset failures
enum class ErrorCode : int {
  contract = 2,
  convergence = 3,
  identifiability = 4,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

private:
  ErrorCode code_;
};

/// Bad arguments, dimension mismatches, malformed requests.
class ContractError : public Error {
public:
  explicit ContractError(const std::string& msg) : Error(ErrorCode::contract, msg) {}
};

/// A required column or field is missing from an input log.
class SchemaError : public ContractError {
public:
  explicit SchemaError(const std::string& msg) : ContractError(msg) {}
};

/// A value could not be parsed or violates a row-level invariant.
class ParseError : public ContractError {
public:
  explicit ParseError(const std::string& msg) : ContractError(msg) {}
};

/// A numeric argument lies outside the function's domain.
class DomainError : public ContractError {
public:
  explicit DomainError(const std::string& msg) : ContractError(msg) {}
};

/// The optimizer stopped without meeting its tolerances. Carries the best
/// point seen so the caller can inspect or restart.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& msg, std::vector<double> best_params,
                   double best_objective, int iterations)
      : Error(ErrorCode::convergence, msg),
        best_params(std::move(best_params)),
        best_objective(best_objective),
        iterations(iterations) {}

  std::vector<double> best_params;
  double best_objective;
  int iterations;
};

/// The data cannot identify the requested parameters (e.g. no events).
class IdentifiabilityError : public Error {
public:
  explicit IdentifiabilityError(const std::string& msg)
      : Error(ErrorCode::identifiability, msg) {}
};

/// A conditioning step produced an empty dataset.
class EmptySubsetError : public Error {
public:
  explicit EmptySubsetError(const std::string& msg)
      : Error(ErrorCode::identifiability, msg) {}
};

}  // namespace trashfire

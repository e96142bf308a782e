#pragma once

#include <stdexcept>
#include <string>

namespace hforge {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  UnboundVariable,
  SingularEvaluation,
  PoleOnContour,
  DegenerateTetrad,
  DegenerateMetric,
  NotLinearizedSolution,
  InconsistentSystem,
  AnsatzInsufficient,
  IndexRange,
  TailUndetermined,
  LegendreFailed,
  DegenerateLegendre,
  DegenerateGH,
  OffSurface,
  DegenerateM,
  WeightMismatch,
  OffConstraint,
  DegenerateSigma,
  BranchPoint,
  DegenerateElliptic,
  LimitAmbiguous,
  DegreeMismatch,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by the expression parser; column is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(ErrorKind::Parse, what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace hforge

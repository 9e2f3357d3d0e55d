#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace floatgrip {

/// Diagnostic from the model-file or scenario parsers. Line and column are
/// 1-based; column points at the offending token.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Semantic };

  ParseError(Kind kind, int line, int column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " +
                           message),
        kind_(kind),
        line_(line),
        column_(column),
        message_(message) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string message_;
};

/// Structurally invalid model. `subject` names the offending item: a link
/// name, "material:<name>" or "geom:<owner>:<index>" (empty if global).
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& message, std::string subject = {})
      : std::runtime_error(message), subject_(std::move(subject)) {}

  const std::string& subject() const { return subject_; }

 private:
  std::string subject_;
};

/// A scenario refers to something the bound model does not provide.
class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The dynamics could not be advanced, e.g. an indefinite mass matrix.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& message, long step = -1)
      : std::runtime_error(step < 0 ? message
                                    : message + " (step " + std::to_string(step) + ")"),
        step_(step) {}

  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace floatgrip

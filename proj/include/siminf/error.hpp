#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace siminf {

enum class ErrorKind {
  syntax,            // formula / file text could not be parsed
  unknown_symbol,    // name not declared in the relevant signature
  arity_mismatch,    // declared arity does not match the use site
  free_variable,     // evaluation reached a variable with no binding
  malformed_input,   // structurally invalid payload, spec, or file
  theory_violation,  // insertion would falsify a theory sentence
  dangling_element,  // dropped element still referenced elsewhere
  tuple_not_present, // deletion of a tuple the relation does not hold
  out_of_language,   // formula uses symbols outside the required signature
  precondition,      // API called outside its stated domain
  resource_budget,   // enumeration would exceed the structure budget
  bounds_exhausted,  // search bounds too small to finish
  io,                // file could not be read or written
  usage,             // bad command-line invocation
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::unknown_symbol: return "unknown_symbol";
    case ErrorKind::arity_mismatch: return "arity_mismatch";
    case ErrorKind::free_variable: return "free_variable";
    case ErrorKind::malformed_input: return "malformed_input";
    case ErrorKind::theory_violation: return "theory_violation";
    case ErrorKind::dangling_element: return "dangling_element";
    case ErrorKind::tuple_not_present: return "tuple_not_present";
    case ErrorKind::out_of_language: return "out_of_language";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::resource_budget: return "resource_budget";
    case ErrorKind::bounds_exhausted: return "bounds_exhausted";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  Error(ErrorKind kind, std::string message, int step)
      : std::runtime_error(std::move(message)), kind_(kind), step_(step) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// 1-based update step the error occurred in, or -1 when not step-scoped.
  int step() const noexcept { return step_; }

private:
  ErrorKind kind_;
  int step_ = -1;
};

/// Parse failure with a character offset and a hint at what was expected.
class SyntaxError : public Error {
public:
  SyntaxError(std::string message, std::size_t offset, std::string expected)
      : Error(ErrorKind::syntax,
              message + " (offset " + std::to_string(offset) +
                  (expected.empty() ? "" : ", expected " + expected) + ")"),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

}  // namespace siminf

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace tradeoff {

// Base for every error raised by the library. Carries an optional dotted field
// path ("quality.f1_macro", "tokens") so callers can report where input went bad.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message, std::string field = {})
      : std::runtime_error(message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed input text (bad JSON, bad CSV cell, wrong value type).
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::string field = {})
      : Error(message, std::move(field)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input with a missing, unknown, or mistyped field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A value that breaks a domain invariant (negative latency, f1 outside [0, 1], ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Operation called outside its domain (empty input, q outside [0, 1], tau <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Lookup against a pricing snapshot or record set that has no such entry.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace tradeoff

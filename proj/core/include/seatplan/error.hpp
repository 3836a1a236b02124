#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace seatplan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or message.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally well-formed data that breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownIdError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling ran out of attempts.
class PlacementError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, int level) : Error(what), level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

/// An answer that is not a bijection from the party onto the scene seats.
class AssignmentError : public Error {
 public:
  using Error::Error;
};

/// A metric whose denominator is empty (e.g. no weight-3 constraints).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class BudgetExhaustedError : public Error {
 public:
  using Error::Error;
};

class UtteranceParseError : public Error {
 public:
  UtteranceParseError(const std::string& what, std::string matched_prefix)
      : Error(what), matched_prefix_(std::move(matched_prefix)) {}
  const std::string& matched_prefix() const noexcept { return matched_prefix_; }

 private:
  std::string matched_prefix_;
};

}  // namespace seatplan

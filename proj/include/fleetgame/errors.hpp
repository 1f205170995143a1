#pragma once

#include <stdexcept>
#include <string>

namespace fleetgame {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented range or shape. `field()` names the offending
/// input using a JSON-pointer-like path when one is known.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::string message, std::string field = {})
      : Error(std::move(message)), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Argument outside the mathematical domain of a function (e.g. a price
/// outside [0, 1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation not available for this kind of input.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace fleetgame

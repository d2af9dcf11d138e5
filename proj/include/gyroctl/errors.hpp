#pragma once

#include <stdexcept>
#include <string>

namespace gyroctl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSkew : public Error {
 public:
  using Error::Error;
};

class InvalidUnitVector : public Error {
 public:
  using Error::Error;
};

class InvalidRotation : public Error {
 public:
  using Error::Error;
};

/// The implicit group-element solve of the variational integrator failed.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

class InvalidEquilibrium : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario document. Carries the 1-based line when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class MismatchedScenarios : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gyroctl

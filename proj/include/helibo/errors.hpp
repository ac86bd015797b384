#pragma once

#include <stdexcept>
#include <string>

namespace helibo {

// Base for every error the library raises on a violated precondition or a
// numerical failure. Callers that only care about "something went wrong"
// catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidBox : public Error {
 public:
  using Error::Error;
};

class AltitudeTooLow : public Error {
 public:
  using Error::Error;
};

class NonFiniteCommand : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class InvalidEnsembleSize : public Error {
 public:
  using Error::Error;
};

class SingularKernel : public Error {
 public:
  using Error::Error;
};

class DegenerateBox : public Error {
 public:
  using Error::Error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace helibo

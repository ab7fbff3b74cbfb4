#pragma once

#include <stdexcept>
#include <string>

namespace rdv {

// Base of everything the library throws on purpose. Each subclass maps to a
// distinct CLI exit code (see tools/rendezvous.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration, file, or argument.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Query outside the model: time outside [0, T], gift of a player who has
// none, malformed strategy tree.
class ModelError : public Error {
 public:
  using Error::Error;
};

// A bundle acts differently in scenarios its player cannot tell apart.
class ConsistencyError : public ModelError {
 public:
  using ModelError::ModelError;
};

// The horizon T is too small to certify a result.
class HorizonError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdv

#pragma once

#include <stdexcept>
#include <string>

namespace qfg {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Operation applied in a state that forbids it (e.g. re-activating a
// completed function node).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

// A forced measurement outcome whose Born probability is below 1e-15.
class ImpossibleOutcomeError : public Error {
 public:
  using Error::Error;
};

// The graph assigns (near-)zero mass to every assignment.
class ContradictoryGraphError : public Error {
 public:
  using Error::Error;
};

// Deliberate desk-scale limits (qubit caps, partition sizes).
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Graph document violates the schema; the message names the offender.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfg

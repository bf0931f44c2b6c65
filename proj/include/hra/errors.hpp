#pragma once

#include <stdexcept>
#include <string>

namespace hra {

// Base of every error the arena raises. `kind()` is the stable tag used in
// machine-readable error records.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

class InvalidActionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-action"; }
};

class ProtocolError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "protocol"; }
};

// Observation inconsistent with every hypothesis still in the support.
class ContradictionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "contradiction"; }
};

// RHAE over a level set that is empty once crash-wins are removed.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "undefined-metric"; }
};

}  // namespace hra

#pragma once

#include <stdexcept>
#include <string>

namespace powerone {

/// Caller violated a precondition (mismatched spaces, invalid weights, ...).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// An exact enumeration would exceed its hard size guard. Oracles refuse
/// rather than truncate.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// The alternative has zero information distance to the null class, so no
/// power-one test of level below one exists.
class NoSeparationError : public std::runtime_error {
 public:
  explicit NoSeparationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A requested certificate (separation rate, budget, ...) could not be
/// produced at the demanded strength.
class CertificationError : public std::runtime_error {
 public:
  explicit CertificationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A configuration or serialized document does not match the schema.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace powerone

#pragma once

#include <stdexcept>
#include <string>

namespace rieszlab {

enum class ErrorKind {
  Validation,      // malformed input or violated set hypothesis
  Infeasible,      // solver cannot satisfy the request (pool too small, too large)
  InfiniteEnergy,  // coincident points
  Io,
};

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::Infeasible, what) {}
};

class InfiniteEnergyError : public Error {
 public:
  explicit InfiniteEnergyError(const std::string& what) : Error(ErrorKind::InfiniteEnergy, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::InfiniteEnergy: return "infinite_energy";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace rieszlab

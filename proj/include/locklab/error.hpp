#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace locklab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed bench text. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Structural violation: duplicate or undefined signal, cycle, unknown node.
class NetlistError : public Error {
public:
  using Error::Error;
};

/// Two circuits (or a circuit and a vector) do not share the expected interface.
class InterfaceError : public Error {
public:
  using Error::Error;
};

/// A locking request cannot be met by the circuit, e.g. no cone is wide enough.
class InfeasibleError : public Error {
public:
  InfeasibleError(const std::string& what, std::size_t max_available)
      : Error(what), max_available_(max_available) {}

  /// The largest size the circuit can offer for the violated requirement.
  std::size_t max_available() const noexcept { return max_available_; }

private:
  std::size_t max_available_;
};

/// An exhaustive procedure was asked to run on an instance that is too large.
class SizeGuardError : public Error {
public:
  using Error::Error;
};

class KeyFileError : public Error {
public:
  using Error::Error;
};

}  // namespace locklab

#pragma once

#include <stdexcept>
#include <string>

namespace hdual {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

// Pivot selection fell below pivot_tol after the anti-cycling fallback, or the
// iteration cap was hit. Indicates data the solver cannot handle, not a bug in
// the caller.
class NumericalBreakdown : public Error {
public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
public:
  using Error::Error;
};

class InvalidResolution : public Error {
public:
  using Error::Error;
};

// Family shape incompatible with the index set (prefixes need a countable set).
class SpecSetMismatch : public Error {
public:
  using Error::Error;
};

class EmptyFamily : public Error {
public:
  using Error::Error;
};

class UnknownName : public Error {
public:
  using Error::Error;
};

class TraceTooShort : public Error {
public:
  using Error::Error;
};

// Prefix traces need a countable index dimension to walk along.
class NotCountable : public Error {
public:
  using Error::Error;
};

// Reducibility certificates only exist for finite alpha.
class BoundednessRequired : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}
  int line() const { return line_; }

private:
  int line_;
};

}  // namespace hdual

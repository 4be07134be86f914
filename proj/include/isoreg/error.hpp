#pragma once

#include <stdexcept>
#include <string>

namespace isoreg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scale equation has no positive root (all-zero input, or too few
/// nonzero values for the requested breakdown constant).
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class EmptyBlock : public Error {
 public:
  using Error::Error;
};

/// E_G psi' vanishes: the score is flat wherever the error density lives.
class NonIdentifiable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (family names, series files, fit JSON).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace isoreg

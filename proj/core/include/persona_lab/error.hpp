#pragma once

#include <stdexcept>
#include <string>

namespace persona_lab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments or preconditions violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Vector/matrix dimensions that do not agree.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Steering configuration that does not match the network it is applied to.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

// A (model, persona, dataset) cell with no observations.
class MissingCell : public Error {
 public:
  using Error::Error;
};

// Relative effect requested for a cell whose baseline accuracy is zero.
class UndefinedRelativeEffect : public Error {
 public:
  using Error::Error;
};

class EmptyAggregate : public Error {
 public:
  using Error::Error;
};

// Rank correlation over fewer than two points or a constant list.
class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

// Text corpus in which no document yields a single token.
class DegenerateCorpus : public Error {
 public:
  using Error::Error;
};

class MissingAnchor : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace persona_lab

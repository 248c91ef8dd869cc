#pragma once

#include <stdexcept>
#include <string>

namespace epool {

/// Base class for every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad shape, out-of-range level, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed external input: CSV panels, probability files, expressions, JSON documents.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The data cannot support the requested statistic or constraint
/// (zero dispersion, empty index set, singular matrix).
class DegenerateData : public Error {
 public:
  using Error::Error;
};

#define EPOOL_REQUIRE(cond, ExceptionType, message) \
  do {                                              \
    if (!(cond)) throw ExceptionType(message);      \
  } while (false)

}  // namespace epool

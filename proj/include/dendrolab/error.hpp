#pragma once

#include <stdexcept>
#include <string>

namespace dendrolab {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (JSON, rationals, flags).
class FormatError : public Error {
public:
  using Error::Error;
};

/// An operation was called outside its domain.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// The finite approximation is too coarse for the requested construction.
class RefineNeeded : public Error {
public:
  using Error::Error;
};

/// A structure that should be consistent by construction is not.
class InternalError : public Error {
public:
  using Error::Error;
};

} // namespace dendrolab

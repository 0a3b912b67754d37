#pragma once

#include <stdexcept>
#include <string>

namespace beliefrl {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition or schema (bad belief
/// file, unknown proposition, probability out of range, ...).
class ValidationError : public Error
{
public:
  using Error::Error;
};

/// A configured size cap was exceeded (vocabulary cap, state budget).
class CapacityError : public Error
{
public:
  using Error::Error;
};

} // namespace beliefrl

#pragma once

#include <stdexcept>
#include <string>

namespace coarsent {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad descriptor, point outside the space, bad schedule.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A configured point/orbit budget would be exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// The requested strategy cannot be applied to this map/space pair.
class Infeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace coarsent

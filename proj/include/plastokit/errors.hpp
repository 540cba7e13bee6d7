#pragma once

#include <stdexcept>
#include <string>

namespace plastokit {

/// Root of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PLASTOKIT_ERROR_TYPE(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

PLASTOKIT_ERROR_TYPE(NumericalFailure);
PLASTOKIT_ERROR_TYPE(NonFinite);
PLASTOKIT_ERROR_TYPE(DegenerateState);
PLASTOKIT_ERROR_TYPE(ConstraintViolation);
PLASTOKIT_ERROR_TYPE(NoConvergence);
PLASTOKIT_ERROR_TYPE(NegativeMultiplier);
PLASTOKIT_ERROR_TYPE(SingularSystem);
PLASTOKIT_ERROR_TYPE(PathOutsideData);
PLASTOKIT_ERROR_TYPE(ParseError);
PLASTOKIT_ERROR_TYPE(EmptyDataset);
PLASTOKIT_ERROR_TYPE(NonFiniteValue);
PLASTOKIT_ERROR_TYPE(GlobalNoConvergence);
PLASTOKIT_ERROR_TYPE(InvalidArgument);

#undef PLASTOKIT_ERROR_TYPE

}  // namespace plastokit

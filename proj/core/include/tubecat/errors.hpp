#pragma once

#include <stdexcept>
#include <string>

namespace tubecat {

// All recoverable failures are exceptions carrying a stable machine code.
// The CLI maps codes to exit status: usage -> 2, everything else -> 1.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define TUBECAT_DEFINE_ERROR(NAME, CODE)                        \
  class NAME : public Error {                                   \
   public:                                                      \
    explicit NAME(const std::string& what) : Error(CODE, what) {} \
  };

TUBECAT_DEFINE_ERROR(ParseError, "parse")
TUBECAT_DEFINE_ERROR(ValidationError, "validation")
TUBECAT_DEFINE_ERROR(UnknownLabel, "unknown-label")
TUBECAT_DEFINE_ERROR(UnknownBuiltin, "unknown-builtin")
TUBECAT_DEFINE_ERROR(AlgebraMismatch, "algebra-mismatch")
TUBECAT_DEFINE_ERROR(NumericalDegeneracy, "numerical-degeneracy")
TUBECAT_DEFINE_ERROR(NonScalarAction, "non-scalar-action")
TUBECAT_DEFINE_ERROR(ShapeMismatch, "shape-mismatch")
TUBECAT_DEFINE_ERROR(SearchBoundExceeded, "search-bound-exceeded")
TUBECAT_DEFINE_ERROR(BasisMismatch, "basis-mismatch")
TUBECAT_DEFINE_ERROR(EdgeNotInRegion, "edge-not-in-region")
TUBECAT_DEFINE_ERROR(FaceNotInRegion, "face-not-in-region")
TUBECAT_DEFINE_ERROR(GeometryError, "geometry")
TUBECAT_DEFINE_ERROR(BoundaryMismatch, "boundary-mismatch")
TUBECAT_DEFINE_ERROR(SectorMismatch, "sector-mismatch")
TUBECAT_DEFINE_ERROR(NotInSkeinSubspace, "not-in-skein-subspace")
TUBECAT_DEFINE_ERROR(NonUniqueState, "non-unique-state")
TUBECAT_DEFINE_ERROR(BudgetExceeded, "budget-exceeded")
TUBECAT_DEFINE_ERROR(UsageError, "usage")

#undef TUBECAT_DEFINE_ERROR

}  // namespace tubecat

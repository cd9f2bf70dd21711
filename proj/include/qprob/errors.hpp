#pragma once

#include <stdexcept>
#include <string>

namespace qprob {

// Violated preconditions and domain invariants (CLI exit 2).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ill-conditioning, overflow, size explosions (CLI exit 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File system failures (CLI exit 4).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define QPROB_ERROR(Name, Base)                                   \
  struct Name : Base {                                            \
    explicit Name(const std::string& m) : Base(#Name ": " + m) {} \
  }

QPROB_ERROR(DimensionMismatch, DomainError);
QPROB_ERROR(NonHermitianInput, DomainError);
QPROB_ERROR(NonFiniteInput, DomainError);
QPROB_ERROR(InvalidDensity, DomainError);
QPROB_ERROR(NotPositiveSemidefinite, DomainError);
QPROB_ERROR(NotAProjector, DomainError);
QPROB_ERROR(NotUnitary, DomainError);
QPROB_ERROR(NotTracePreserving, DomainError);
QPROB_ERROR(NotEnergyPreserving, DomainError);
QPROB_ERROR(NotLocallyThermal, DomainError);
QPROB_ERROR(OrthogonalPostselection, DomainError);
QPROB_ERROR(ZeroSupportProjector, DomainError);
QPROB_ERROR(UndefinedAngle, DomainError);
QPROB_ERROR(InvalidArgument, DomainError);

QPROB_ERROR(IllConditionedGrid, NumericalError);
QPROB_ERROR(GridTooNarrow, NumericalError);
QPROB_ERROR(SingularThermalState, NumericalError);
QPROB_ERROR(AtomExplosion, NumericalError);

#undef QPROB_ERROR

}  // namespace qprob

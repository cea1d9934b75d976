#pragma once

#include <stdexcept>
#include <string>

namespace brownkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

#define BROWNKIT_ERROR(Name, tag)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return tag; }     \
  };

BROWNKIT_ERROR(DomainError, "domain")
BROWNKIT_ERROR(MalformedMeasureError, "malformed-measure")
BROWNKIT_ERROR(NumericalDegeneracyError, "numerical-degeneracy")
BROWNKIT_ERROR(UnsupportedMeasureError, "unsupported-measure")
BROWNKIT_ERROR(ClassificationError, "classification")
BROWNKIT_ERROR(SingularityError, "singularity")
BROWNKIT_ERROR(AtomCandidateError, "atom-candidate")
BROWNKIT_ERROR(ShapeError, "shape")
BROWNKIT_ERROR(ConfigError, "config")

#undef BROWNKIT_ERROR

// Raised when a root search gives up; keeps the last bracket so callers can
// report it.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double lo, double hi, int iterations)
      : Error(what), lo_(lo), hi_(hi), iterations_(iterations) {}
  const char* kind() const noexcept override { return "solver-failure"; }
  double bracket_lo() const { return lo_; }
  double bracket_hi() const { return hi_; }
  int iterations() const { return iterations_; }

 private:
  double lo_, hi_;
  int iterations_;
};

}  // namespace brownkit

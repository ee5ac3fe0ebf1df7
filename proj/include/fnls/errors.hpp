#pragma once
#include <stdexcept>
#include <string>

namespace fnls {

// Exit-code classes used by the CLI.
enum class ErrorClass { Validation = 2, NonConvergence = 3, Property = 4, Other = 1 };

struct Error : std::runtime_error {
  Error(const std::string& what, ErrorClass cls) : std::runtime_error(what), cls(cls) {}
  ErrorClass cls;
};

#define FNLS_ERROR(Name, Class)                                         \
  struct Name : Error {                                                 \
    explicit Name(const std::string& what)                              \
        : Error(std::string(#Name ": ") + what, ErrorClass::Class) {}   \
  };

FNLS_ERROR(SamplingError, Validation)
FNLS_ERROR(AntiperiodicityViolation, Property)
FNLS_ERROR(SpeedOutOfRange, Validation)
FNLS_ERROR(OmegaOutOfRange, Validation)
FNLS_ERROR(NonConvergence, NonConvergence)
FNLS_ERROR(PositiveEta, NonConvergence)
FNLS_ERROR(GaugeAmbiguity, Property)
FNLS_ERROR(ProfileNotReal, Validation)
FNLS_ERROR(ConvergenceFailure, NonConvergence)
FNLS_ERROR(SpectralGapTooSmall, Property)
FNLS_ERROR(InconsistentRange, Property)
FNLS_ERROR(ChainDoesNotTerminate, Property)
FNLS_ERROR(UnderResolved, Validation)
FNLS_ERROR(PositivityViolation, Property)
FNLS_ERROR(ComplexInput, Validation)
FNLS_ERROR(MonotonicityUnverified, Property)
FNLS_ERROR(BlowupDetected, Property)
FNLS_ERROR(ConservationDriftExceeded, Property)
FNLS_ERROR(StepTooLarge, NonConvergence)
FNLS_ERROR(ValidationError, Validation)
FNLS_ERROR(IOError, Other)

#undef FNLS_ERROR

// Config syntax error; carries the 1-based position.
struct ParseError : Error {
  ParseError(const std::string& msg, int line, int column)
      : Error("ParseError at " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg,
              ErrorClass::Validation),
        line(line),
        column(column) {}
  int line;
  int column;
};

}  // namespace fnls

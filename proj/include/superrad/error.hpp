#pragma once

#include <stdexcept>
#include <string>

namespace superrad {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SUPERRAD_ERROR(Name)                 \
    class Name : public Error {              \
    public:                                  \
        using Error::Error;                  \
    }

// ode kernel
SUPERRAD_ERROR(StepUnderflow);
SUPERRAD_ERROR(MaxStepsExceeded);
SUPERRAD_ERROR(NonFiniteState);
SUPERRAD_ERROR(NoCrossing);

// trajectory analysis
SUPERRAD_ERROR(EmptyTrajectory);
SUPERRAD_ERROR(ThresholdNotReached);
SUPERRAD_ERROR(BoundViolation);

// oracle
SUPERRAD_ERROR(UnknownMode);
SUPERRAD_ERROR(TruncationTooSmall);
SUPERRAD_ERROR(CapExceeded);
SUPERRAD_ERROR(NonPhysicalState);
SUPERRAD_ERROR(DimensionMismatch);

#undef SUPERRAD_ERROR

// Configuration problem; `field()` is the dotted path of the offending key.
class ConfigInvalid : public Error {
public:
    ConfigInvalid(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace superrad

namespace superrad {

// An integration inside a scenario run failed; wraps the kernel's error text.
class IntegrationFailed : public Error {
public:
    using Error::Error;
};

}  // namespace superrad

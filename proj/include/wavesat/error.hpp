#pragma once

#include <stdexcept>
#include <string>

namespace wavesat {

/// Coarse classification used by the command-line front end to pick exit codes.
enum class ErrorClass {
    InvalidConfig,      // bad arguments, out-of-range orders, mismatched dimensions
    Numerical,          // factorization, grid or saturation failures
    Verification,       // a checked property did not hold
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string name, const std::string& what)
        : std::runtime_error(what), class_(cls), name_(std::move(name)) {}

    ErrorClass error_class() const noexcept { return class_; }
    /// Short identifier such as "OrderOutOfRange".
    const std::string& name() const noexcept { return name_; }

private:
    ErrorClass class_;
    std::string name_;
};

#define WAVESAT_DEFINE_ERROR(Type, Class)                                   \
    class Type : public Error {                                             \
    public:                                                                 \
        explicit Type(const std::string& what)                              \
            : Error(ErrorClass::Class, #Type, what) {}                      \
    };

WAVESAT_DEFINE_ERROR(OrderOutOfRange, InvalidConfig)
WAVESAT_DEFINE_ERROR(OddLengthFilter, InvalidConfig)
WAVESAT_DEFINE_ERROR(DimensionMismatch, InvalidConfig)
WAVESAT_DEFINE_ERROR(SupportMismatch, InvalidConfig)
WAVESAT_DEFINE_ERROR(HorizonOverflow, InvalidConfig)
WAVESAT_DEFINE_ERROR(PlanTooShort, InvalidConfig)
WAVESAT_DEFINE_ERROR(ParseError, InvalidConfig)
WAVESAT_DEFINE_ERROR(IoError, InvalidConfig)
WAVESAT_DEFINE_ERROR(InvalidArgument, InvalidConfig)
WAVESAT_DEFINE_ERROR(FactorizationFailure, Numerical)
WAVESAT_DEFINE_ERROR(GridTooCoarse, Numerical)
WAVESAT_DEFINE_ERROR(TooManyZeros, Numerical)
WAVESAT_DEFINE_ERROR(SaturationFailure, Numerical)
WAVESAT_DEFINE_ERROR(DegenerateSchedule, Numerical)
WAVESAT_DEFINE_ERROR(WindowNotFound, Verification)

#undef WAVESAT_DEFINE_ERROR

}  // namespace wavesat

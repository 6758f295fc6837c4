#pragma once

#include <stdexcept>
#include <string>

namespace obslab {

// Base of all library errors. numerical() separates genuine numerical
// failures from bad parameters so the runner can map them to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual bool numerical() const { return true; }
};

#define OBSLAB_NUMERIC_ERROR(Name)                                        \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    };

#define OBSLAB_PARAM_ERROR(Name)                                          \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
        bool numerical() const override { return false; }                 \
    };

OBSLAB_NUMERIC_ERROR(DomainError)
OBSLAB_NUMERIC_ERROR(NoConvergence)
OBSLAB_NUMERIC_ERROR(SeparationError)
OBSLAB_NUMERIC_ERROR(QuadratureError)
OBSLAB_NUMERIC_ERROR(CoverageFailure)
OBSLAB_NUMERIC_ERROR(NoRoot)
OBSLAB_NUMERIC_ERROR(DegenerateSet)
OBSLAB_NUMERIC_ERROR(EmptySpace)
OBSLAB_NUMERIC_ERROR(BoundViolation)
OBSLAB_NUMERIC_ERROR(MassViolation)
OBSLAB_NUMERIC_ERROR(TailError)
OBSLAB_NUMERIC_ERROR(NoFeasibleN)
OBSLAB_PARAM_ERROR(ParamError)
OBSLAB_PARAM_ERROR(ConfigError)

#undef OBSLAB_NUMERIC_ERROR
#undef OBSLAB_PARAM_ERROR

}  // namespace obslab

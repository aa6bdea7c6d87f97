#pragma once

#include <stdexcept>
#include <string>

namespace lacuna {

// All library errors derive from Error.  `kind` distinguishes violated
// preconditions (bad arguments, unsupported spec) from numerical failures
// (a tolerance or representable range that cannot be met); the CLI maps
// them to exit codes 1 and 2 respectively.
class Error : public std::runtime_error {
public:
    enum class Kind { precondition, numerical };

    Error(Kind kind, const std::string& name, const std::string& what)
        : std::runtime_error(name + ": " + what), kind_(kind), name_(name) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

private:
    Kind kind_;
    std::string name_;
};

#define LACUNA_DEFINE_ERROR(NAME, KIND)                                     \
    class NAME : public Error {                                            \
    public:                                                                 \
        explicit NAME(const std::string& what)                              \
            : Error(Kind::KIND, #NAME, what) {}                             \
    }

LACUNA_DEFINE_ERROR(InvalidSpec, precondition);
LACUNA_DEFINE_ERROR(IndexBelowStart, precondition);
LACUNA_DEFINE_ERROR(DomainError, precondition);
LACUNA_DEFINE_ERROR(NoBoundAvailable, precondition);
LACUNA_DEFINE_ERROR(BadLambda, precondition);
LACUNA_DEFINE_ERROR(LambdaTooWide, precondition);
LACUNA_DEFINE_ERROR(WindowTooSmall, precondition);
LACUNA_DEFINE_ERROR(NotApplicable, precondition);
LACUNA_DEFINE_ERROR(OutOfRange, precondition);
LACUNA_DEFINE_ERROR(PreconditionTruncation, precondition);

LACUNA_DEFINE_ERROR(CapExceeded, numerical);
LACUNA_DEFINE_ERROR(PhasePrecisionLoss, numerical);
LACUNA_DEFINE_ERROR(MomentCheckFailed, numerical);
LACUNA_DEFINE_ERROR(DecayCheckFailed, numerical);
LACUNA_DEFINE_ERROR(QuadratureBudgetExceeded, numerical);
LACUNA_DEFINE_ERROR(DegenerateRegression, numerical);
LACUNA_DEFINE_ERROR(DegenerateFit, numerical);

#undef LACUNA_DEFINE_ERROR

} // namespace lacuna

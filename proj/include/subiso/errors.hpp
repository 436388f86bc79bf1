#pragma once

#include <stdexcept>
#include <string>

#include "subiso/types.hpp"

namespace subiso {

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SUBISO_ERROR(Name)                                                   \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    };

SUBISO_ERROR(Infeasible)
SUBISO_ERROR(NotPSD)
SUBISO_ERROR(OracleRankViolation)
SUBISO_ERROR(NonTermination)
SUBISO_ERROR(ZeroDirection)
SUBISO_ERROR(NotInPolytope)
SUBISO_ERROR(NotATree)
SUBISO_ERROR(NotAnAssignment)
SUBISO_ERROR(BadShape)
SUBISO_ERROR(PreconditionViolated)
SUBISO_ERROR(InvalidInstance)

#undef SUBISO_ERROR

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, Residuals r, int iterations)
        : Error("NoConvergence", what), residuals(r), iterations(iterations) {}
    Residuals residuals;
    int iterations;
};

// Raised by the walk engine when the covariance solver gives up.
class SdpFailure : public Error {
public:
    SdpFailure(const std::string& what, Residuals r)
        : Error("SdpFailure", what), residuals(r) {}
    Residuals residuals;
};

}  // namespace subiso

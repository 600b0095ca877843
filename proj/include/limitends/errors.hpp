#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace limitends {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define LIMITENDS_DEFINE_ERROR(Name)                                                  \
    class Name : public Error {                                                       \
    public:                                                                           \
        explicit Name(const std::string& what) : Error(std::string(#Name ": ") + what) {} \
    }

LIMITENDS_DEFINE_ERROR(SameBase);
LIMITENDS_DEFINE_ERROR(CoincidentPoints);
LIMITENDS_DEFINE_ERROR(DegenerateIntersection);
LIMITENDS_DEFINE_ERROR(InvalidSeeds);
LIMITENDS_DEFINE_ERROR(InvalidLimits);
LIMITENDS_DEFINE_ERROR(InvalidParams);
LIMITENDS_DEFINE_ERROR(EmptyChoiceInterval);
LIMITENDS_DEFINE_ERROR(StarViolated);
LIMITENDS_DEFINE_ERROR(TooLarge);
LIMITENDS_DEFINE_ERROR(MeshFailure);
LIMITENDS_DEFINE_ERROR(CurveOutsideDomain);
LIMITENDS_DEFINE_ERROR(MeshNotSimplyConnected);
LIMITENDS_DEFINE_ERROR(ParseError);

#undef LIMITENDS_DEFINE_ERROR

/// Newton failed to reach the requested gradient tolerance. Carries the energy
/// history so callers can dump it.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<double> trace)
        : Error("NonConvergence: " + what), energy_trace(std::move(trace)) {}
    std::vector<double> energy_trace;
};

}  // namespace limitends

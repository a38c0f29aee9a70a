#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace amspec {

using cd = std::complex<double>;
using IVec = std::vector<int>;
using RVec = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy. exit_code() is the CLI contract: 1 usage or parse, 2 numerical precondition, 3 non-convergence.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual int exit_code() const { return 2; }
    virtual const char* kind() const { return "Error"; }
};

#define AMSPEC_ERROR(Name, Code)                                          \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& w) : Error(w) {}                 \
        int exit_code() const override { return Code; }                   \
        const char* kind() const override { return #Name; }              \
    };

AMSPEC_ERROR(ParseError, 1)
AMSPEC_ERROR(PreconditionFailed, 2)
AMSPEC_ERROR(CoverageGap, 2)
AMSPEC_ERROR(DenominatorUnderflow, 2)
AMSPEC_ERROR(NyquistViolation, 2)
AMSPEC_ERROR(IndexOutOfTruncation, 2)
AMSPEC_ERROR(DimensionMismatch, 2)
AMSPEC_ERROR(TargetNotReached, 2)
AMSPEC_ERROR(NoConvergence, 3)

#undef AMSPEC_ERROR

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw PreconditionFailed(msg);
}

// <v> = (1 + |v|^2)^{1/2}
inline double bracket(const RVec& v) {
    double s = 1.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}
inline double bracket(const IVec& v) {
    double s = 1.0;
    for (int x : v) s += double(x) * x;
    return std::sqrt(s);
}

// Worker cap shared by every parallel loop; 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs body(i) for i in [0, n). Outputs must be disjoint per i; results are then schedule independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace amspec

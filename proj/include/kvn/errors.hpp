#pragma once

#include <stdexcept>
#include <string>

namespace kvn {

// Input-side failures: malformed files, schema violations, bad parameters.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures raised by solvers and spectral routines.
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotStrictlyPositive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Kernel detection could not separate near-zero eigenvalues from the rest.
struct TolTooCoarse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KernelMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NegativeTime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RootBracketFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateDifference : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kvn

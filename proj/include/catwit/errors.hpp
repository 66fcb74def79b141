#pragma once

#include <stdexcept>
#include <string>

namespace catwit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncated basis cannot hold the requested state at the working tolerance.
struct CutoffTooSmall : Error {
    using Error::Error;
};

// Odd cat at vanishing amplitude (or a basis built from one) is ill-defined.
struct DegenerateCat : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

// State has weight outside the four-dimensional cat subspace.
struct LeakageError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct IncompleteKraus : Error {
    using Error::Error;
};

struct NotPositive : Error {
    using Error::Error;
};

struct BadStatistics : Error {
    using Error::Error;
};

// Photon-statistics estimation cannot explain the data at the given cutoff.
struct DegenerateEstimate : Error {
    using Error::Error;
};

struct UncertifiedConfig : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

} // namespace catwit

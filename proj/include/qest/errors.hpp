#pragma once

#include <stdexcept>
#include <string>

namespace qest {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimMismatchError : Error { using Error::Error; };
struct OddDimensionError : Error { using Error::Error; };
struct SingularError : Error { using Error::Error; };
struct NotHermitianError : Error { using Error::Error; };
struct NotPositiveDefiniteError : Error { using Error::Error; };
struct BadParameterError : Error { using Error::Error; };
struct NotRealizableError : Error { using Error::Error; };
struct RejectionExhaustedError : Error { using Error::Error; };
struct NonCanonicalKError : Error { using Error::Error; };
struct EmptyAnglesError : Error { using Error::Error; };
struct SingularRError : Error { using Error::Error; };
struct NotStabilizableError : Error { using Error::Error; };
struct MaxIterationsError : Error { using Error::Error; };
struct ImaginaryCostError : Error { using Error::Error; };
struct InvalidProblemError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

/// Thrown by sweep() when one grid row fails; carries the offending angle.
struct SweepRowError : Error {
    SweepRowError(double theta_deg_, const std::string& what_)
        : Error("sweep failed at theta = " + std::to_string(theta_deg_) + " deg: " + what_),
          theta_deg(theta_deg_) {}
    double theta_deg;
};

} // namespace qest

#pragma once

#include <stdexcept>
#include <string>

namespace hodgelab {

/// Error categories shared by every module. The integer values are the
/// status codes returned through the C interface.
enum class ErrorCode : int {
    DuplicateId = 1,
    DanglingEndpoint = 2,
    GradeMissing = 3,
    DegreeOutOfRange = 4,
    BadResolution = 5,
    EmptySpectrum = 6,
    InsufficientModes = 7,
    ResolutionMismatch = 8,
    BadTopology = 9,
    GluingMismatch = 10,
    OpenBoundaryLeft = 11,
    SOutOfRange = 12,
    NoConvergence = 13,
    AmbiguousKernel = 14,
    UnresolvedSpectrum = 15,
    AmbientMismatch = 16,
    EdgeNotCylindrical = 17,
    MuTooLarge = 18,
    IllConditionedFit = 19,
    ResidualTooLarge = 20,
    CylinderTooShort = 21,
    RankDeficientInput = 22,
    ROutOfRange = 23,
    TruncationTooShort = 24,
    ParseError = 25,
    ValidationError = 26,
    Io = 27,
};

const char* error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code)
    {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace hodgelab

#pragma once

#include <stdexcept>
#include <string>

namespace polysimp {

/// Base class for all recoverable errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input point sequence cannot form a valid polyline (fewer than two
/// distinct points, or non-finite coordinates).
struct BadPolyline : Error {
    using Error::Error;
};

/// Requested segment count K outside [1, N-1] for an N-vertex curve.
struct KOutOfRange : Error {
    using Error::Error;
};

/// Exhaustive search guard tripped (N > 24 or K > 8).
struct InstanceTooLarge : Error {
    using Error::Error;
};

/// An approximation vertex does not occur in the original curve.
struct VertexNotInOriginal : Error {
    using Error::Error;
};

/// Decimation factor outside (0, 1), or so close to 1 that the level
/// schedule degenerates.
struct BadRho : Error {
    using Error::Error;
};

/// Pyramid level ordinal outside the valid range.
struct LevelOutOfRange : Error {
    using Error::Error;
};

/// Fidelity input error is negative.
struct NegativeError : Error {
    using Error::Error;
};

/// Candidate error is zero while the reference error is positive.
struct ZeroDenominator : Error {
    using Error::Error;
};

/// Coastline roughness outside (0, 1).
struct BadRoughness : Error {
    using Error::Error;
};

/// Slope fit needs at least four distinct sizes.
struct TooFewPoints : Error {
    using Error::Error;
};

/// Command line could not be parsed into a valid run configuration.
struct UsageError : Error {
    using Error::Error;
};

/// File could not be read, parsed, or written.
struct IoError : Error {
    using Error::Error;
};

}  // namespace polysimp

#pragma once

#include <stdexcept>
#include <string>

namespace ffs3d {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File missing or unreadable.
struct IoError : Error {
    using Error::Error;
};

// Byte layout or text syntax violated (misaligned record, bad field count,
// unparseable number, non-finite coordinate).
struct FormatError : Error {
    using Error::Error;
};

// Parsed values violate a semantic constraint (e.g. non-orthonormal
// rectification matrix).
struct ValidationError : Error {
    using Error::Error;
};

// A point cloud arrived in the wrong coordinate frame.
struct FrameError : Error {
    using Error::Error;
};

// 2D box collapses to a line or point.
struct DegenerateBoxError : Error {
    using Error::Error;
};

// smear_weights applied to an already-smeared histogram.
struct SmearTwiceError : Error {
    using Error::Error;
};

// Frustum contains no points; the caller decides the fallback.
struct EmptyFrustumError : Error {
    using Error::Error;
};

// Requested RoI center lies outside [near, far] of the frustum.
struct InvalidCenterError : Error {
    using Error::Error;
};

}  // namespace ffs3d

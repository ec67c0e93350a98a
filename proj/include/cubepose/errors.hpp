#pragma once

#include <stdexcept>
#include <string>

namespace cubepose {

// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct NotARotation : Error { using Error::Error; };
struct InvalidExtents : Error { using Error::Error; };
struct NonPositiveScale : Error { using Error::Error; };
struct TooFewPoints : Error { using Error::Error; };

// metrics
struct EmptyPointSet : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };

// optim
struct Diverged : Error { using Error::Error; };

// ingest: PLY
struct MalformedHeader : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct TruncatedBody : Error { using Error::Error; };
struct MalformedBody : Error { using Error::Error; };

// ingest: KITTI
struct WrongFieldCount : Error { using Error::Error; };
struct NonNumericField : Error { using Error::Error; };
struct DontCareRecord : Error { using Error::Error; };

// ingest: annotations
struct SchemaViolation : Error { using Error::Error; };
struct InvalidRotation : Error { using Error::Error; };

// audit
struct BehindCamera : Error { using Error::Error; };

// config
struct MissingFile : Error { using Error::Error; };
struct BadValue : Error { using Error::Error; };

}  // namespace cubepose

#pragma once

#include <stdexcept>
#include <string>

namespace maskmark {

// Error taxonomy. The CLI maps these onto exit codes: file/format errors
// exit 2, everything else raised during processing exits 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedFile : Error {
  using Error::Error;
};
struct UnsupportedFormat : Error {
  using Error::Error;
};
struct IoFailure : Error {
  using Error::Error;
};

struct RateTooLow : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct BadLength : Error {
  using Error::Error;
};
struct InvalidFrameSet : Error {
  using Error::Error;
};
struct SkippedBand : Error {
  using Error::Error;
};
struct DecoyTooShort : Error {
  using Error::Error;
};
struct SidecarMismatch : Error {
  using Error::Error;
};

}  // namespace maskmark

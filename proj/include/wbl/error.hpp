#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wbl {

enum class ErrorCode {
  InvalidInput,
  NonManifoldEdge,
  NonManifoldVertex,
  InconsistentOrientation,
  DegenerateFace,
  ZeroMixedArea,
  NoBoundary,
  FieldLengthMismatch,
  InvalidConfig,
  NoCatenoid,
  NonpositiveRadius,
  BasePointOnBoundary,
  BasePointOffSurface,
  Disconnected,
  EmptySample,
  DegenerateSample,
  BoundaryMismatch,
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Exit status table shared by the CLI: 2 config, 3 numeric, 4 I/O.
int exit_code_for(ErrorCode code);

}  // namespace wbl

#pragma once

#include <stdexcept>
#include <string>

namespace pbill {

enum class ErrorCode {
  // geometry
  SelfIntersecting,
  DegenerateArea,
  DuplicateVertices,
  CollinearRun,
  NonFinite,
  KTooSmall,
  InvalidEdge,
  // table
  RadiusTooLarge,
  ErosionInvalid,
  // dynamics
  NotIncoming,
  NoCollision,
  VertexAmbiguity,
  NoArcs,
  NotPolygonalMode,
  // analysis
  GrazingExcluded,
  NoArcHits,
  ExcludedTrajectory,
  // io
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pbill

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sidql {

enum class Errc {
  MalformedAsf,
  MalformedAmc,
  TooShort,
  UnreachablePose,
  InvalidArgument,
  ZeroVector,
  PoleSingularity,
  MeridianSingularity,
  DegenerateInterval,
  InvalidKeyframeSet,
  DegenerateSequence,
  InvalidW,
  ShapeMismatch,
  NonFiniteGradient,
  VersionMismatch,
  CorruptCheckpoint,
  NoValidAction,
  EmptyDataset,
  Io,
};

inline constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MalformedAsf: return "MalformedAsf";
    case Errc::MalformedAmc: return "MalformedAmc";
    case Errc::TooShort: return "TooShort";
    case Errc::UnreachablePose: return "UnreachablePose";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::PoleSingularity: return "PoleSingularity";
    case Errc::MeridianSingularity: return "MeridianSingularity";
    case Errc::DegenerateInterval: return "DegenerateInterval";
    case Errc::InvalidKeyframeSet: return "InvalidKeyframeSet";
    case Errc::DegenerateSequence: return "DegenerateSequence";
    case Errc::InvalidW: return "InvalidW";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::CorruptCheckpoint: return "CorruptCheckpoint";
    case Errc::NoValidAction: return "NoValidAction";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` tells callers which
/// failure they are looking at.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// True for failures caused by numerics rather than bad input data.
inline bool is_numeric_failure(Errc code) {
  switch (code) {
    case Errc::NonFiniteGradient:
    case Errc::PoleSingularity:
    case Errc::MeridianSingularity:
    case Errc::DegenerateInterval:
      return true;
    default:
      return false;
  }
}

}  // namespace sidql

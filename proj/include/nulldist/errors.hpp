#pragma once

#include <stdexcept>
#include <string>

namespace nulldist {

enum class Errc {
  OutOfDomain,
  ZeroVector,
  NotTemporal,
  UnknownModel,
  BadParams,
  DegenerateSegment,
  NotCausal,
  TooLarge,
  EmptyRegion,
  Unreachable,
  SnapFailed,
  OutOfRange,
  NotCausalRay,
  NoCausalPairs,
  Config,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NotTemporal: return "NotTemporal";
    case Errc::UnknownModel: return "UnknownModel";
    case Errc::BadParams: return "BadParams";
    case Errc::DegenerateSegment: return "DegenerateSegment";
    case Errc::NotCausal: return "NotCausal";
    case Errc::TooLarge: return "TooLarge";
    case Errc::EmptyRegion: return "EmptyRegion";
    case Errc::Unreachable: return "Unreachable";
    case Errc::SnapFailed: return "SnapFailed";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::NotCausalRay: return "NotCausalRay";
    case Errc::NoCausalPairs: return "NoCausalPairs";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace nulldist

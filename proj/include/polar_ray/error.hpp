#pragma once

#include <stdexcept>
#include <string>

namespace polar_ray {

enum class Errc {
  DimensionMismatch,
  UnknownVariable,
  ParseError,
  NonInvariantPotential,
  DegeneratePotential,
  DegenerateFrame,
  SingularA,
  RankMismatch,
  DomainEscape,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::UnknownVariable: return "UnknownVariable";
    case Errc::ParseError: return "ParseError";
    case Errc::NonInvariantPotential: return "NonInvariantPotential";
    case Errc::DegeneratePotential: return "DegeneratePotential";
    case Errc::DegenerateFrame: return "DegenerateFrame";
    case Errc::SingularA: return "SingularA";
    case Errc::RankMismatch: return "RankMismatch";
    case Errc::DomainEscape: return "DomainEscape";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

  // Problems with the inputs themselves (bad file, bad expression, bad model
  // data) map to CLI exit code 2; everything else is a check-level failure.
  bool is_input_error() const {
    switch (code_) {
      case Errc::DimensionMismatch:
      case Errc::UnknownVariable:
      case Errc::ParseError:
      case Errc::NonInvariantPotential:
      case Errc::IoError:
        return true;
      default:
        return false;
    }
  }

 private:
  Errc code_;
};

}  // namespace polar_ray

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vota {

enum class Errc {
  InsufficientCores,
  InsufficientDevices,
  NoVacantBand,
  InvalidDemand,
  Infeasible,
  OutOfRaster,
  UnknownAllocation,
  DuplicateAllocation,
  AlreadyAttached,
  IncompleteEndpoints,
  StalePlan,
  NotAttached,
  UnknownDevice,
  BackendUnavailable,
  BackendRejected,
  InvalidProfile,
  UnsupportedSize,
  ParseError,
  ValidationError,
  AllocationFailed,
  IoError,
};

constexpr std::string_view errc_name(Errc e) noexcept {
  switch (e) {
    case Errc::InsufficientCores: return "InsufficientCores";
    case Errc::InsufficientDevices: return "InsufficientDevices";
    case Errc::NoVacantBand: return "NoVacantBand";
    case Errc::InvalidDemand: return "InvalidDemand";
    case Errc::Infeasible: return "Infeasible";
    case Errc::OutOfRaster: return "OutOfRaster";
    case Errc::UnknownAllocation: return "UnknownAllocation";
    case Errc::DuplicateAllocation: return "DuplicateAllocation";
    case Errc::AlreadyAttached: return "AlreadyAttached";
    case Errc::IncompleteEndpoints: return "IncompleteEndpoints";
    case Errc::StalePlan: return "StalePlan";
    case Errc::NotAttached: return "NotAttached";
    case Errc::UnknownDevice: return "UnknownDevice";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::BackendRejected: return "BackendRejected";
    case Errc::InvalidProfile: return "InvalidProfile";
    case Errc::UnsupportedSize: return "UnsupportedSize";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::AllocationFailed: return "AllocationFailed";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

// Every failure raised by the library carries an Errc so callers (and the
// CLI exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(Errc::ValidationError, join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace vota

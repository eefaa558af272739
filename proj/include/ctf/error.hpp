#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctf {

enum class Errc {
  // array-io
  BadMagic,
  UnsupportedDtype,
  UnsupportedVersion,
  MalformedHeader,
  TruncatedPayload,
  DuplicateName,
  NotAZip,
  MemberNotNpy,
  // dynamics
  DimensionMismatch,
  Blowup,
  // challenge
  ConfigInvalid,
  IoError,
  SchemaMismatch,
  // scoring
  ShapeMismatch,
  DegenerateTruth,
  WindowTooSmall,
  ScoringFailed,
  // baselines
  ManifestMismatch,
  // referee
  Unauthorized,
  UnknownPack,
  QuotaExceeded,
  ValidationFailed,
  PayloadTooLarge,
  CorruptJournal,
  NotFound,
};

constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::UnsupportedDtype: return "UnsupportedDtype";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::NotAZip: return "NotAZip";
    case Errc::MemberNotNpy: return "MemberNotNpy";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::Blowup: return "Blowup";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::IoError: return "IoError";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::DegenerateTruth: return "DegenerateTruth";
    case Errc::WindowTooSmall: return "WindowTooSmall";
    case Errc::ScoringFailed: return "ScoringFailed";
    case Errc::ManifestMismatch: return "ManifestMismatch";
    case Errc::Unauthorized: return "Unauthorized";
    case Errc::UnknownPack: return "UnknownPack";
    case Errc::QuotaExceeded: return "QuotaExceeded";
    case Errc::ValidationFailed: return "ValidationFailed";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::CorruptJournal: return "CorruptJournal";
    case Errc::NotFound: return "NotFound";
  }
  return "Unknown";
}

/// Every failure in the library surfaces as this exception; `code()` is the
/// stable, machine-readable part and `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace ctf

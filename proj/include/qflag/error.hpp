#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qflag {

enum class ErrorCode {
  InvalidInput,
  CyclicQuiver,
  MultipleSources,
  UnreachableVertex,
  SourceRankNotOne,
  NoStablePoints,
  NotGraftable,
  NotPointed,
  NotFullDimensional,
  UnboundedSlice,
  NotInCone,
  TooManyRows,
  AsymmetricRoots,
  NotAbelian,
  NotSymmetric,
  NonIntegerCharacteristic,
  WrongRank,
  NegativeBundlePairing,
  PoleAtZero,
  UnboundedEnumeration,
  SpecializationMismatch,
  DegenerateSpecialization,
  MalformedFilter,
  BucketInvariantMismatch,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::CyclicQuiver: return "CyclicQuiver";
    case ErrorCode::MultipleSources: return "MultipleSources";
    case ErrorCode::UnreachableVertex: return "UnreachableVertex";
    case ErrorCode::SourceRankNotOne: return "SourceRankNotOne";
    case ErrorCode::NoStablePoints: return "NoStablePoints";
    case ErrorCode::NotGraftable: return "NotGraftable";
    case ErrorCode::NotPointed: return "NotPointed";
    case ErrorCode::NotFullDimensional: return "NotFullDimensional";
    case ErrorCode::UnboundedSlice: return "UnboundedSlice";
    case ErrorCode::NotInCone: return "NotInCone";
    case ErrorCode::TooManyRows: return "TooManyRows";
    case ErrorCode::AsymmetricRoots: return "AsymmetricRoots";
    case ErrorCode::NotAbelian: return "NotAbelian";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NonIntegerCharacteristic: return "NonIntegerCharacteristic";
    case ErrorCode::WrongRank: return "WrongRank";
    case ErrorCode::NegativeBundlePairing: return "NegativeBundlePairing";
    case ErrorCode::PoleAtZero: return "PoleAtZero";
    case ErrorCode::UnboundedEnumeration: return "UnboundedEnumeration";
    case ErrorCode::SpecializationMismatch: return "SpecializationMismatch";
    case ErrorCode::DegenerateSpecialization: return "DegenerateSpecialization";
    case ErrorCode::MalformedFilter: return "MalformedFilter";
    case ErrorCode::BucketInvariantMismatch: return "BucketInvariantMismatch";
  }
  return "Unknown";
}

/// Domain error raised by every qflag operation. The code identifies the
/// failed precondition; the message carries record-level context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qflag

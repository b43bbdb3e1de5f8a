#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qhd {

enum class ErrorKind {
  Validation,
  UnwrapAmbiguous,
  AllMasked,
  FloorViolation,
  Commensurability,
  NonFinite,
  NodeFormation,
  NoConvergence,
  SeriesTooShort,
  Format,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::UnwrapAmbiguous: return "UnwrapAmbiguous";
    case ErrorKind::AllMasked: return "AllMasked";
    case ErrorKind::FloorViolation: return "FloorViolation";
    case ErrorKind::Commensurability: return "CommensurabilityError";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NodeFormation: return "NodeFormation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::Format: return "FormatError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindError : public Error {
 public:
  explicit KindError(const std::string& what) : Error(K, what) {}
};

using ValidationError = KindError<ErrorKind::Validation>;
using UnwrapAmbiguous = KindError<ErrorKind::UnwrapAmbiguous>;
using AllMasked = KindError<ErrorKind::AllMasked>;
using FloorViolation = KindError<ErrorKind::FloorViolation>;
using CommensurabilityError = KindError<ErrorKind::Commensurability>;
using NonFinite = KindError<ErrorKind::NonFinite>;
using NodeFormation = KindError<ErrorKind::NodeFormation>;
using NoConvergence = KindError<ErrorKind::NoConvergence>;
using SeriesTooShort = KindError<ErrorKind::SeriesTooShort>;
using FormatError = KindError<ErrorKind::Format>;

/// Numerical failures map to a distinct CLI exit status from validation failures.
constexpr bool is_numerical(ErrorKind kind) noexcept {
  return kind == ErrorKind::NonFinite || kind == ErrorKind::NodeFormation ||
         kind == ErrorKind::NoConvergence || kind == ErrorKind::UnwrapAmbiguous ||
         kind == ErrorKind::FloorViolation || kind == ErrorKind::AllMasked;
}

}  // namespace qhd

#pragma once

#include <stdexcept>
#include <string>

namespace aopsic {

enum class ErrorCode {
  InvalidArgument,
  SingularMatrix,
  NotPositiveDefinite,
  BadLength,
  EmptyInput,
  EmptyConstellation,
  InsufficientMoments,
  RankDeficient,
  NonPositiveNorm,
  ZeroSiPower,
  Diverged,
  UnknownMcs,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// No nonzero orthogonal polynomial of this order exists for the moments.
class RankDeficientError : public Error {
 public:
  RankDeficientError(int order, const std::string& what)
      : Error(ErrorCode::RankDeficient, what), order_(order) {}

  int order() const noexcept { return order_; }

 private:
  int order_;
};

}  // namespace aopsic

#pragma once

#include <stdexcept>
#include <string>

namespace causelab {

enum class ErrorCode {
  CyclicGraph,
  RoleViolation,
  InvalidSpec,
  UnknownNode,
  NotLinearGaussian,
  NotTabularDiscrete,
  SupportTooLarge,
  NotAStochasticMatrix,
  SingularConditioningBlock,
  InvalidQuery,
  EmptySample,
  DegeneratePartition,
  UnsolvedKernel,
  RankDeficientCrossCovariance,
  KTooLarge,
  Underdetermined,
  RankDeficientDesign,
  IncompatibleModels,
  WrongViewProvenance,
  DegenerateDirection,
  NotBinary,
  InsufficientData,
  ConfigError,
  MissingMethod,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace causelab

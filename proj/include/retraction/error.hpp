#pragma once

#include <stdexcept>
#include <string>

namespace retraction {

// Mirrors rtx_status in retraction.h; values must stay in sync.
enum class ErrorCode {
  InvalidArgument = 1,
  FileNotFound,
  Io,
  SchemaViolation,
  DisconnectedAfterRetries,
  InvalidTopologyParam,
  DegenerateGroup,
  RankDeficient,
  InsufficientObservations,
  EmptyAfterFiltering,
  MissingRetractionDate,
  YearOrderViolation,
  OutOfRangeP,
  InvalidConfig,
  Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace retraction

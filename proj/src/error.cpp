#include "retraction/error.hpp"

namespace retraction {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::Io: return "Io";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DisconnectedAfterRetries: return "DisconnectedAfterRetries";
    case ErrorCode::InvalidTopologyParam: return "InvalidTopologyParam";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientObservations: return "InsufficientObservations";
    case ErrorCode::EmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::MissingRetractionDate: return "MissingRetractionDate";
    case ErrorCode::YearOrderViolation: return "YearOrderViolation";
    case ErrorCode::OutOfRangeP: return "OutOfRangeP";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace retraction

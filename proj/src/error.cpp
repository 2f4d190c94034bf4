#include "senate/error.hpp"

namespace senate {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config: return "config";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::SortitionTimeout: return "sortition-timeout";
    case ErrorCode::IncompleteMatrix: return "incomplete-matrix";
    case ErrorCode::DegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::NoData: return "no-data";
    case ErrorCode::Quorum: return "quorum";
    case ErrorCode::NoGoodValues: return "no-good-values";
    case ErrorCode::NoBroadcast: return "no-broadcast";
  }
  return "unknown";
}

}  // namespace senate

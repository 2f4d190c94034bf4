#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace senate {

enum class ErrorCode {
  Config,
  Domain,
  SortitionTimeout,
  IncompleteMatrix,
  DegenerateGeometry,
  NoData,
  Quorum,
  NoGoodValues,
  NoBroadcast,
};

/// Short, stable identifier used as an episode failure reason.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace senate

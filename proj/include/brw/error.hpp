// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brw {

enum class ErrorCode {
  InvalidArgument,
  NoSolution,
  Unbounded,
  ParticleCapExceeded,
  AllExtinct,
  InvalidNode,
  BetaOutsideDomain,
  ExtinctForest,
  HorizonTooSmall,
  WeightCollapse,
  BudgetExceeded,
  DomainError,
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

/// Raised when a simulation hits its particle budget. Carries the last
/// generation that was completed before the cap was reached.
class ParticleCapExceeded : public Error {
 public:
  ParticleCapExceeded(std::size_t depth_reached, std::size_t cap)
      : Error(ErrorCode::ParticleCapExceeded,
              "particle cap " + std::to_string(cap) +
                  " exceeded after generation " +
                  std::to_string(depth_reached)),
        depth_reached_(depth_reached) {}

  std::size_t depth_reached() const noexcept { return depth_reached_; }

 private:
  std::size_t depth_reached_;
};

}  // namespace brw

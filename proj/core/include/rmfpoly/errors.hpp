#pragma once

#include <stdexcept>
#include <string>

namespace rmfpoly {

// Input is well-formed but outside the mathematical domain of the operation
// (non-positive polynomial values, inadmissible polynomial, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A scale schedule whose largest scale does not fit under the feasibility cap.
class InfeasibleScale : public std::runtime_error {
 public:
  explicit InfeasibleScale(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rmfpoly

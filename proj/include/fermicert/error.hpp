// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fermicert {

enum class ErrorCode {
  site_not_in_lattice = 1,
  domain,
  dimension_mismatch,
  parity,
  precondition,
  certification_failed,
  ambiguous_kernel,
  gap_closure,
  size_limit,
  not_hermitian,
  nesting,
  config,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a measured Lieb-Robinson quantity exceeds its bound.
class CertificationFailed : public Error {
 public:
  CertificationFailed(double t, double measured, double bound);
  double time;
  double measured;
  double bound;
};

/// Raised by projection_flow when the tracked gap drops below the floor.
class GapClosure : public Error {
 public:
  GapClosure(double location, double gap, double grid_point);
  double location;    ///< bisected parameter where gap == floor
  double gap;         ///< gap at the offending grid point
  double grid_point;  ///< first grid point below the floor
};

}  // namespace fermicert

// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fermicert/fock.hpp"

namespace fermicert {

/// Real, continuous, piecewise-polynomial coefficient t -> c(t).
///
/// Piece k covers [breakpoints[k], breakpoints[k+1]) and evaluates
/// sum_j coefficients[k][j] (t - breakpoints[k])^j. Times before the first
/// breakpoint use the first piece; times after the last use the last piece.
class TimeProfile {
 public:
  TimeProfile() : TimeProfile(constant(1.0)) {}
  TimeProfile(std::vector<double> breakpoints, std::vector<std::vector<double>> coefficients);

  static TimeProfile constant(double value);
  /// v0 before t0, linear on [t0, t1], v1 after t1.
  static TimeProfile linear_ramp(double t0, double t1, double v0, double v1);

  double operator()(double t) const;
  bool is_constant() const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::vector<double>>& coefficients() const { return coefficients_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<std::vector<double>> coefficients_;
};

struct InteractionTerm {
  SiteMask support;
  FockOperator op;
  TimeProfile profile;
  std::string label;

  /// ||op||, computed once on first use and shared between copies.
  double op_norm() const;

  struct NormCache {
    std::once_flag once;
    double value = 0.0;
  };
  std::shared_ptr<NormCache> norm_cache = std::make_shared<NormCache>();
};

/// Finite map from subsets of the ambient lattice to (possibly time-
/// dependent) self-adjoint operators: Phi(Z, t) = sum of profile(t) * op over
/// the terms registered on Z.
class Interaction {
 public:
  explicit Interaction(SiteSetPtr ambient,
                       double t_min = -std::numeric_limits<double>::infinity(),
                       double t_max = std::numeric_limits<double>::infinity());

  /// Rejects non-self-adjoint operators and operators whose declared support
  /// is not contained in `support`.
  void add_term(SiteMask support, FockOperator op, TimeProfile profile = TimeProfile::constant(1.0),
                std::string label = {});

  const SiteSetPtr& ambient() const { return ambient_; }
  const std::vector<InteractionTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  bool contains_time(double t) const { return t >= t_min_ && t <= t_max_; }

  /// Every term even-tagged.
  bool is_even() const;
  bool is_time_independent() const;

  /// Distinct supports in first-insertion order.
  std::vector<SiteMask> supports() const;
  FockOperator value(SiteMask z, double t) const;
  /// ||Phi(Z, t)||.
  double value_norm(SiteMask z, double t) const;

  Interaction scaled(double factor) const;

 private:
  SiteSetPtr ambient_;
  double t_min_;
  double t_max_;
  std::vector<InteractionTerm> terms_;
  std::vector<SiteMask> order_;
  std::map<SiteMask, std::vector<std::size_t>> by_support_;
};

}  // namespace fermicert

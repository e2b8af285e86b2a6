// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "fermicert/dynamics.hpp"
#include "fermicert/lattice.hpp"

namespace fermicert {

enum class BracketMode { commutator, anticommutator };
const char* bracket_mode_name(BracketMode mode);

/// 2 ||A|| ||B|| (exp(2 I) - 1) * geometry, where I = int_s^t ||Phi||_G and
/// geometry = sum_{x in dX} sum_{y in Y} G(x, y).
double lr_rhs(double norm_a, double norm_b, double phi_norm_integral, double geometry);

/// 0 when X and Y are disjoint, 1 otherwise.
int delta_indicator(SiteMask x, SiteMask y);

struct LRPoint {
  double t;
  double measured;
  double bound;
  double ratio;  ///< measured / bound; 0 when both vanish
  double phi_integral;
};

struct LRBoundReport {
  BracketMode mode = BracketMode::commutator;
  SiteSetPtr ambient;
  SiteMask support_a = 0;
  SiteMask support_b = 0;
  Parity parity_a = Parity::mixed;
  Parity parity_b = Parity::mixed;
  double norm_a = 0.0;
  double norm_b = 0.0;
  double start = 0.0;
  SiteMask boundary = 0;  ///< Phi-boundary of supp A
  double geometry = 0.0;
  double g_norm = 0.0;
  std::vector<LRPoint> points;
  double max_unitarity_defect = 0.0;

  double max_ratio() const;
};

struct CertifyOptions {
  double step = kDefaultStep;
  int quadrature_intervals = 64;
  double relative_slack = 1e-9;
  /// Absorbs round-off in the measured norm where the bound itself is ~0.
  double absolute_floor = 1e-14;
};

/// Measures ||[tau_{t,s}(A), B]|| (or the anticommutator) on `times` and
/// checks it against lr_rhs. Throws precondition errors for misuse and
/// CertificationFailed when the inequality is violated.
LRBoundReport certify(const FockOperator& a, const FockOperator& b, const Interaction& phi,
                      const GFunction& g, double s, std::span<const double> times,
                      BracketMode mode = BracketMode::commutator,
                      const CertifyOptions& options = {});

struct SeriesDiagnostics {
  std::vector<double> term_bounds;   ///< bounds on a_n(t), n = 1..N
  std::vector<double> partial_sums;  ///< 2||A|| ||B|| sum_{n<=N} a_n bounds
  double remainder_bound = 0.0;      ///< bound on R_{N+1}(t)
  double closed_form = 0.0;          ///< lr_rhs for the same inputs
};

struct SeriesInputs {
  double norm_a = 1.0;
  double norm_b = 1.0;
  double phi_integral = 0.0;
  double geometry = 0.0;
  std::size_t boundary_size = 0;
  double g_norm = 0.0;
};

SeriesDiagnostics series_diagnostics(const SeriesInputs& in, int order);

/// Columns: t, measured, bound, ratio, mode.
std::string report_csv(const LRBoundReport& report);

}  // namespace fermicert

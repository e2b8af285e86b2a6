// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "fermicert/interaction.hpp"

namespace fermicert {

/// H(t) = sum of the terms with support inside `region`.
FockOperator local_hamiltonian(const Interaction& phi, SiteMask region, double t);
FockOperator local_hamiltonian(const Interaction& phi, double t);

/// U(t, s) solving dU/dt = -i H(t) U with U(s, s) = 1.
struct Propagator {
  SiteSetPtr ambient;
  Matrix unitary;
  double start = 0.0;
  double end = 0.0;
  double step = 0.0;  ///< step actually used
  int steps = 0;
  double unitarity_defect = 0.0;  ///< ||U*U - 1|| (upper estimate)
  int reunitarizations = 0;
};

inline constexpr double kDefaultStep = 1e-2;
inline constexpr double kUnitarityTolerance = 1e-9;

/// Second-order midpoint (Magnus) stepping U <- exp(-i H(t_mid) dt) U with an
/// exact exponential per step. Only even interactions are accepted.
Propagator propagate(const Interaction& phi, double s, double t, double step = kDefaultStep,
                     SiteMask region = ~SiteMask{0});

/// Propagators U(t_k, s) for an increasing list of times, sharing the
/// stepping between consecutive grid points.
std::vector<Propagator> propagate_grid(const Interaction& phi, double s,
                                       std::span<const double> times,
                                       double step = kDefaultStep,
                                       SiteMask region = ~SiteMask{0});

/// U* A U.
FockOperator heisenberg(const FockOperator& a, const Propagator& u);
/// U A U*.
FockOperator inverse_heisenberg(const FockOperator& a, const Propagator& u);

}  // namespace fermicert

// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

// Interaction builders: hopping chains, Kitaev-type chains, flat-band models
// and random even interactions.

#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "fermicert/gap.hpp"
#include "fermicert/interaction.hpp"
#include "fermicert/lattice.hpp"

namespace fermicert {

/// J (a*_x a_{x+1} + h.c.) on each bond and mu n_x on each site.
Interaction hopping_chain(std::size_t length, double j, double mu,
                          Boundary boundary = Boundary::open);

/// Hopping ramped linearly from j0 to j1 over [t0, t1]; constant outside.
Interaction ramped_hopping_chain(std::size_t length, double j0, double j1, double t0, double t1,
                                 double mu = 0.0);

struct KitaevParams {
  double hopping = 1.0;
  double pairing = 0.8;
  /// Chemical potential; NaN selects the frustration-free value
  /// 2 sqrt(hopping^2 - pairing^2).
  double mu = std::numeric_limits<double>::quiet_NaN();
  /// Optional per-bond weights (length L - 1).
  std::vector<double> bond_weights;

  double resolved_mu() const;
};

/// Bond terms -t (a*_x a_{x+1} + h.c.) + Delta (a_x a_{x+1} + h.c.)
/// - mu/2 (n_x + n_{x+1}), each shifted to have minimum eigenvalue 0.
Interaction kitaev_chain(std::size_t length, const KitaevParams& params = {});

/// Phi({x}) = n_x.
Interaction number_chain(std::size_t length);

/// Single-particle orbitals on a metric graph with ball supports.
struct OrbitalSet {
  MetricGraph graph = MetricGraph::chain(1);
  std::vector<Vector> valence;
  std::vector<Vector> conduction;
  std::vector<std::size_t> valence_centers;
  std::vector<std::size_t> conduction_centers;
  double radius = 0.0;

  SiteMask ball(std::size_t center) const;
  /// Throws precondition naming the first violated invariant.
  void validate(double tol = 1e-12) const;
};

/// U = R_odd(phi) R_even(theta), a brick wall of 2x2 rotations. Valence
/// orbitals U e_{2k}, conduction orbitals U e_{2k+1}; radius 2.
OrbitalSet brick_wall_orbitals(std::size_t length, double theta, double phi);

struct BandModes {
  std::vector<FockOperator> valence;     ///< b_k
  std::vector<FockOperator> conduction;  ///< c_l
};

/// b_k = sum_x conj(f_k(x)) a_x and likewise for c_l.
BandModes band_operators(const OrbitalSet& orbitals);

/// Phi(B_{x_k}(R)) = w_v (1 - b*_k b_k), Phi(B_{y_l}(R)) = w_c c*_l c_l.
Interaction flat_band_model(const OrbitalSet& orbitals, double valence_weight = 1.0,
                            double conduction_weight = 1.0);

/// Gapped orbital-rotation path: theta = 0.3 + 0.8 s, phi = 0.2 + 0.6 s.
Interaction rotated_flat_band(std::size_t length, double s);
/// Conduction weight 1 - 2 s; the gap |1 - 2 s| closes at s = 1/2.
Interaction closing_flat_band(std::size_t length, double s);

/// One increment per distinct support, ordered by smallest then largest
/// site index.
HamiltonianSequence left_to_right_sequence(const Interaction& phi, double tol = -1.0);

/// Deterministic from seed: one even self-adjoint term per window of
/// consecutive site indices with at most range + 1 sites, norm <= strength.
Interaction random_even_interaction(const SiteSetPtr& lambda, std::size_t range, double strength,
                                    std::uint64_t seed);

/// Random combination of Krauss unitary strings on `region` with
/// coefficients uniform in the unit square; Parity::mixed keeps all strings.
/// Normalized to unit tracial 2-norm.
FockOperator random_local_operator(const SiteSetPtr& lambda, SiteMask region, Parity parity,
                                   std::mt19937_64& rng);

/// Uniform double in [0, 1) from 53 random bits.
double uniform01(std::mt19937_64& rng);

}  // namespace fermicert

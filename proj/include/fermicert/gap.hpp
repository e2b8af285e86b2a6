// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

// Spectral tools: frustration-freeness, kernel projections, the martingale
// gap certificate and gap-protected transport of spectral projections.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fermicert/error.hpp"
#include "fermicert/interaction.hpp"

namespace fermicert {

/// Sorted eigenvalues. Rejects matrices that are not self-adjoint to 1e-12.
RealVector spectrum(const FockOperator& h);

struct FrustrationFreeResult {
  bool frustration_free = false;
  double residual = 0.0;  ///< inf spec H - sum_X inf spec Phi(X)
  /// max ||(Phi(X) - inf spec Phi(X)) psi|| over ground vectors psi.
  double annihilation_residual = 0.0;
  double ground_energy = 0.0;
  double termwise_sum = 0.0;
  std::size_t ground_degeneracy = 0;
};

inline constexpr double kFrustrationTolerance = 1e-9;

FrustrationFreeResult frustration_free_check(const Interaction& phi);

/// Default kernel tolerance 1e-8 max(1, ||H||).
double default_kernel_tolerance(const RealVector& eigenvalues);

/// Projection onto eigenvalues <= tol. A negative tol selects the default.
/// Throws precondition when H has an eigenvalue below -tol and
/// ambiguous-kernel when an eigenvalue lies in (tol/10, 10 tol).
FockOperator kernel_projection(const FockOperator& h, double tol = -1.0);

/// Rounded trace of a projection.
std::size_t projection_rank(const FockOperator& p);

inline constexpr double kNestingTolerance = 1e-10;

/// E_0 = 1 - G_1, E_n = G_n - G_{n+1}, E_N = G_N from G_1, ..., G_N.
/// Throws nesting when ||G_{n+1} - G_{n+1} G_n|| exceeds 1e-10.
std::vector<FockOperator> resolution_family(const std::vector<FockOperator>& kernels);

struct ResolutionDefects {
  double self_adjoint = 0.0;
  double orthogonality = 0.0;  ///< max ||E_n E_m - delta_nm E_n||
  double completeness = 0.0;   ///< ||sum E_n - 1||
};

ResolutionDefects resolution_defects(const std::vector<FockOperator>& family);

/// 0 = H_0 <= H_1 <= ... <= H_N with increments h_n = H_n - H_{n-1}.
class HamiltonianSequence {
 public:
  static HamiltonianSequence from_increments(std::vector<FockOperator> increments,
                                             double tol = -1.0);
  static HamiltonianSequence from_partial_sums(std::vector<FockOperator> partial_sums,
                                               double tol = -1.0);

  std::size_t length() const { return increments_.size(); }
  const std::vector<FockOperator>& increments() const { return increments_; }
  /// H_1, ..., H_N.
  const std::vector<FockOperator>& partial_sums() const { return partial_sums_; }
  double tolerance() const { return tol_; }
  /// Most negative eigenvalue over all increments (0 when all are >= 0).
  double monotonicity_defect() const { return monotonicity_defect_; }

 private:
  HamiltonianSequence() = default;
  void validate();

  std::vector<FockOperator> increments_;
  std::vector<FockOperator> partial_sums_;
  double tol_ = -1.0;
  double monotonicity_defect_ = 0.0;
};

struct MartingaleStep {
  std::size_t n = 0;
  double gamma = 0.0;             ///< smallest nonzero eigenvalue of h_n
  double epsilon_squared = 0.0;   ///< ||E_{n-1} g_n E_{n-1}||
  std::size_t kernel_rank = 0;    ///< rank G_n
  std::size_t reach = 0;          ///< largest n-1-k with [E_k, g_n] != 0
};

struct GapCertificate {
  double gamma = 0.0;
  std::optional<std::size_t> ell;  ///< absent when [E_k, g_{n+1}] != 0 for some k > n
  double epsilon = 0.0;
  std::optional<double> bound;
  std::optional<double> exact_gap;
  std::size_t ground_degeneracy = 0;
  double defect_i = 0.0;    ///< max(0, -min spec(h_n - gamma (1 - g_n)))
  double defect_ii = 0.0;   ///< largest commutator outside the window
  double defect_iii = 0.0;  ///< max(0, max spec(E_n g_{n+1} E_n - eps^2 E_n))
  ResolutionDefects resolution;
  std::vector<MartingaleStep> steps;
};

inline constexpr double kCommutationTolerance = 1e-10;

/// Martingale-method lower bound gamma (1 - eps sqrt(1 + ell))^2 on the gap
/// of H_N. With compute_exact the gap of H_N above its ground cluster is
/// also obtained by full diagonalization.
GapCertificate martingale_certificate(const HamiltonianSequence& seq, bool compute_exact = true);

/// Gap of H above the cluster of eigenvalues within tol of its minimum.
std::optional<double> spectral_gap(const RealVector& eigenvalues, double tol);

struct SandwichResult {
  bool ok = false;
  double c = 0.0;
  double big_c = 0.0;
  double ground_energy = 0.0;
  /// Unit vector in ker H_N not annihilated by H_target - E when !ok.
  Vector witness;
  double witness_residual = 0.0;
};

/// Best constants with c H_N <= H_target - E 1 <= C H_N.
SandwichResult sandwich_check(const FockOperator& target, const FockOperator& h_n);

struct FlowPoint {
  double s = 0.0;
  double gap = 0.0;
  double trace = 0.0;
  std::size_t rank = 0;
  double defect = 0.0;  ///< ||P(s) - U(s) P(0) U(s)*||
};

struct FlowReport {
  std::vector<FlowPoint> points;
  bool rank_constant = true;
  double max_defect = 0.0;
  int substeps = 0;
  double max_step_change = 0.0;  ///< max ||P(s + delta) - P(s)|| over substeps
  double max_unitarity_defect = 0.0;
};

using HamiltonianFamily = std::function<FockOperator(double)>;

inline constexpr int kDefaultFlowSubsteps = 64;

/// Tracks P(s), the projection onto the `rank` lowest eigenvalues (the
/// ground cluster of H(s_0) when rank is 0), by Kato transport
/// U' = [P', P] U on each grid interval. Throws gap-closure when the gap
/// above P(s) falls below gamma_min, locating the crossing by bisection.
FlowReport projection_flow(const HamiltonianFamily& family, const std::vector<double>& grid,
                           double gamma_min, std::size_t rank = 0,
                           int substeps = kDefaultFlowSubsteps);

/// Same for time-independent interactions.
FlowReport projection_flow(const std::function<Interaction(double)>& family,
                           const std::vector<double>& grid, double gamma_min,
                           std::size_t rank = 0, int substeps = kDefaultFlowSubsteps);

}  // namespace fermicert

// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

// Conditional expectations onto local subalgebras in Krauss form.
//
// E_X(A) = 4^{-|Lambda\X|} sum_alpha u(alpha)* A u(alpha), where alpha ranges
// over {0,1,2,3}^{Lambda\X} and u(alpha) is the ordered product of the
// single-site unitaries 1, a*+a, a*-a, 1-2a*a. F_X replaces the odd-parity
// Krauss operators by theta_X u(alpha).

#pragma once

#include <array>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fermicert/fock.hpp"

namespace fermicert {

/// tr(A) / 2^|Lambda|.
cplx tracial_state(const FockOperator& a);

/// Assignment of a Krauss label to each site of Lambda\X, in SiteSet order.
struct KraussIndex {
  std::vector<std::size_t> sites;
  std::vector<std::uint8_t> labels;

  /// prod_y pi(label_y) with pi(0) = pi(3) = +1, pi(1) = pi(2) = -1.
  int parity() const;
  /// All 4^|sites| indices, first site varying fastest.
  static std::vector<KraussIndex> enumerate(const SiteSet& lambda, SiteMask complement);
};

/// u_x^{(0..3)} as operators.
std::array<FockOperator, 4> krauss_unitaries(const SiteSetPtr& lambda, std::size_t index);

/// Site-sweep evaluation: composes the single-site averages over Lambda\X.
FockOperator cond_exp_E(const FockOperator& a, SiteMask region);
/// Same, sweeping the complement in the given order.
FockOperator cond_exp_E(const FockOperator& a, SiteMask region,
                        std::span<const std::size_t> sweep_order);

inline constexpr std::size_t kMaxKraussSites = 10;

/// Direct Krauss sum over all 4^|Lambda\X| unitary strings. Refuses
/// |Lambda\X| > 10.
FockOperator cond_exp_E_krauss_sum(const FockOperator& a, SiteMask region);

/// Brute-force Krauss sum with the global operators theta_X u(alpha) on the
/// odd-parity labels. Refuses |Lambda\X| > 10.
FockOperator cond_exp_F(const FockOperator& a, SiteMask region);

struct LocalApproximation {
  FockOperator approximation;  ///< E_X(A)
  double error = 0.0;          ///< ||A - E_X(A)||
  double commutator_bound = 0.0;
  /// True when commutator_bound = max_alpha ||[A, u(alpha)]|| was computed
  /// exhaustively; otherwise it is the site-wise triangle estimate
  /// sum_x max_k ||[A, u_x^{(k)}]||.
  bool bound_exact = false;
};

inline constexpr std::size_t kExhaustiveKraussSites = 4;

/// Requires an even-tagged A.
LocalApproximation local_approximation(const FockOperator& a, SiteMask region);

struct CondExpReport {
  std::string input;
  SiteMask region = 0;
  FockOperator output;
  std::string method;
  double projection_defect = 0.0;  ///< ||E(E(A)) - E(A)||
  /// Locality defect of the parity-resolved output E+ and E- theta_Lambda.
  double range_defect = 0.0;
};

CondExpReport cond_exp_report(const FockOperator& a, SiteMask region, std::string input = {});

struct FamilyDefects {
  double composition = 0.0;  ///< ||E_X E_Y - E_{X cap Y}||
  double product = 0.0;      ///< product property on even A in A_Z, B in A_Y
  double volume = 0.0;       ///< E_X^{Lambda_1} vs E_X^{Lambda_2}
  int samples = 0;
};

/// Random-sample check of the composition, product and volume-independence
/// properties of the family {E_X}.
FamilyDefects verify_expectation_family(const SiteSetPtr& lambda, SiteMask x, SiteMask y,
                                        int samples, std::mt19937_64& rng);

}  // namespace fermicert

// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

// Exact Fock-space representation of the CAR algebra on a finite site set.
//
// Operators are dense matrices in the occupation-number basis. Basis state s
// has site i occupied iff bit i of s is set (first site = least significant
// bit). Annihilators follow the Jordan-Wigner convention
//   a_x = (prod_{y < x} (-1)^{n_y}) sigma^-_x
// with the ordering fixed by the SiteSet.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fermicert/linalg.hpp"

namespace fermicert {

/// Bitmask over the indices of a SiteSet.
using SiteMask = std::uint64_t;

/// A site identifier: integer coordinates (one entry for chains).
using Site = std::vector<int>;

inline constexpr std::size_t kMaxSites = 20;

class SiteSet {
 public:
  explicit SiteSet(std::vector<Site> sites);

  /// Sites {0}, {1}, ..., {n-1}.
  static std::shared_ptr<const SiteSet> chain(std::size_t n);

  std::size_t size() const { return sites_.size(); }
  std::size_t dimension() const { return std::size_t{1} << sites_.size(); }
  const Site& site(std::size_t index) const { return sites_.at(index); }
  const std::vector<Site>& sites() const { return sites_; }

  bool contains(const Site& s) const;
  /// Throws site-not-in-lattice.
  std::size_t index_of(const Site& s) const;

  SiteMask all() const { return (SiteMask{1} << sites_.size()) - 1; }
  SiteMask mask_of(std::span<const Site> sites) const;
  SiteMask mask_of_indices(std::span<const std::size_t> indices) const;
  std::vector<std::size_t> indices(SiteMask mask) const;
  /// Throws domain error when mask has bits beyond size().
  void check_mask(SiteMask mask) const;

  std::string describe(SiteMask mask) const;

  bool operator==(const SiteSet& other) const { return sites_ == other.sites_; }

 private:
  std::vector<Site> sites_;
};

using SiteSetPtr = std::shared_ptr<const SiteSet>;

inline SiteMask site_bit(std::size_t i) { return SiteMask{1} << i; }
inline bool is_subset(SiteMask a, SiteMask b) { return (a & ~b) == 0; }
int popcount(SiteMask m);

enum class Parity { even, odd, mixed };
const char* parity_name(Parity p);
Parity parity_product(Parity a, Parity b);

/// Relative tolerance used to validate parity tags.
inline constexpr double kParityTolerance = 1e-10;

/// Matrix-free application hook: y = A x.
using LinearMap = std::function<void(std::span<const cplx>, std::span<cplx>)>;

/// A matrix on the Fock space of `ambient` carrying a declared support and
/// parity. Immutable once constructed.
class FockOperator {
 public:
  /// Validates dimension, support, and (for even/odd tags) the parity
  /// relative to the largest entry.
  FockOperator(SiteSetPtr ambient, SiteMask support, Matrix matrix, Parity parity);

  /// Parity is inferred from the matrix.
  static FockOperator from_matrix(SiteSetPtr ambient, SiteMask support, Matrix matrix);
  /// For results whose parity follows algebraically from tagged operands:
  /// round-off in the wrong-parity block is discarded instead of checked.
  static FockOperator projected(SiteSetPtr ambient, SiteMask support, Matrix matrix, Parity parity);
  static FockOperator identity(SiteSetPtr ambient);
  static FockOperator zero(SiteSetPtr ambient);

  const Matrix& matrix() const { return *matrix_; }
  const SiteSetPtr& ambient() const { return ambient_; }
  SiteMask support() const { return support_; }
  Parity parity() const { return parity_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_->rows()); }

  FockOperator adjoint() const;
  FockOperator scaled(cplx factor) const;
  /// Same matrix, larger declared support.
  FockOperator widened(SiteMask support) const;

  Vector apply(const Vector& x) const;
  LinearMap as_linear_map() const;

  bool same_ambient(const FockOperator& other) const;

 private:
  SiteSetPtr ambient_;
  SiteMask support_;
  std::shared_ptr<const Matrix> matrix_;
  Parity parity_;
};

FockOperator operator+(const FockOperator& a, const FockOperator& b);
FockOperator operator-(const FockOperator& a, const FockOperator& b);
FockOperator operator*(const FockOperator& a, const FockOperator& b);
FockOperator operator*(cplx factor, const FockOperator& a);

// --- generators -----------------------------------------------------------

FockOperator build_annihilator(const SiteSetPtr& lambda, std::size_t index);
FockOperator build_annihilator(const SiteSetPtr& lambda, const Site& x);
FockOperator build_creator(const SiteSetPtr& lambda, std::size_t index);
FockOperator build_creator(const SiteSetPtr& lambda, const Site& x);

/// N_X = sum_{x in X} a*_x a_x.
FockOperator number_operator(const SiteSetPtr& lambda, SiteMask region);
/// theta_X = (-1)^{N_X}.
FockOperator parity_operator(const SiteSetPtr& lambda, SiteMask region);

/// Theta_Lambda(A) = theta A theta.
Matrix parity_conjugate(const Matrix& m);

/// (A+, A-) with A+ + A- = A.
std::pair<FockOperator, FockOperator> parity_decompose(const FockOperator& a);

/// Largest entry of the wrong-parity block divided by the largest entry.
double parity_defect(const Matrix& m, Parity parity);
Parity classify_parity(const Matrix& m, double tolerance = kParityTolerance);

enum class MonomialSymbol : std::uint8_t { identity, annihilate, create, number };

/// One symbol per site of the SiteSet, in SiteSet order.
struct MonomialLabel {
  std::vector<MonomialSymbol> symbols;
  Parity parity() const;
};

/// Ordered product prod_x A_x under the SiteSet ordering.
FockOperator monomial(const SiteSetPtr& lambda, const MonomialLabel& label);

double op_norm(const FockOperator& a);

FockOperator commutator(const FockOperator& a, const FockOperator& b);
FockOperator anticommutator(const FockOperator& a, const FockOperator& b);

/// Largest (anti)commutation defect of A against the generators a_y, a*_y
/// for y outside `region`: the even part must commute and the odd part must
/// anticommute. Zero iff A lies in the algebra of `region`.
double locality_defect(const FockOperator& a, SiteMask region);

/// Re-expresses A (an element of the CAR algebra over A.ambient()) on the
/// Fock space of a larger site set containing every site of A.ambient().
FockOperator embed(const FockOperator& a, const SiteSetPtr& larger);

}  // namespace fermicert

namespace fermicert {

/// Generalized permutation matrix with +-1 entries: column s holds sign[s]
/// at row target[s]. Products of the single-site unitaries 1, a*+a, a*-a and
/// 1-2a*a are of this form in the Jordan-Wigner basis.
struct SignedPermutation {
  std::vector<std::uint32_t> target;
  std::vector<double> sign;

  static SignedPermutation identity(std::size_t dimension);
  Matrix dense() const;
  /// u* m u in O(d^2).
  Matrix conjugate(const Matrix& m) const;
  /// tr(u* m) in O(d).
  cplx trace_against(const Matrix& m) const;
  /// (*this) * rhs
  SignedPermutation then_left_of(const SignedPermutation& rhs) const;
};

/// u_x^{(k)} for k in {0,1,2,3}: 1, a*_x + a_x, a*_x - a_x, 1 - 2 a*_x a_x.
SignedPermutation single_site_unitary(const SiteSet& lambda, std::size_t index, int k);

/// u_{x_1}^{(k_1)} ... u_{x_n}^{(k_n)} for the listed site indices.
SignedPermutation unitary_string(const SiteSet& lambda, std::span<const std::size_t> indices,
                                 std::span<const std::uint8_t> labels);

}  // namespace fermicert

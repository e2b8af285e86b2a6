// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>

#include "fermicert/error.hpp"

namespace fermicert {

namespace {

double jw_sign(std::size_t state, std::size_t index) {
  const auto below = static_cast<SiteMask>(state) & (site_bit(index) - 1);
  return (std::popcount(below) & 1) ? -1.0 : 1.0;
}

double state_parity(std::size_t state) {
  return (std::popcount(static_cast<SiteMask>(state)) & 1) ? -1.0 : 1.0;
}

void require_same_ambient(const FockOperator& a, const FockOperator& b) {
  if (!a.same_ambient(b)) {
    throw Error(ErrorCode::dimension_mismatch, "operators act on different site sets");
  }
}

}  // namespace

int popcount(SiteMask m) { return std::popcount(m); }

// --- SiteSet -------------------------------------------------------------

SiteSet::SiteSet(std::vector<Site> sites) : sites_(std::move(sites)) {
  if (sites_.size() > kMaxSites) {
    throw Error(ErrorCode::size_limit,
                "at most " + std::to_string(kMaxSites) + " sites are supported");
  }
  std::set<Site> seen;
  for (const auto& s : sites_) {
    if (s.empty()) throw Error(ErrorCode::domain, "site identifier must be non-empty");
    if (!seen.insert(s).second) throw Error(ErrorCode::domain, "duplicate site in SiteSet");
  }
}

std::shared_ptr<const SiteSet> SiteSet::chain(std::size_t n) {
  std::vector<Site> sites;
  sites.reserve(n);
  for (std::size_t i = 0; i < n; ++i) sites.push_back({static_cast<int>(i)});
  return std::make_shared<const SiteSet>(std::move(sites));
}

bool SiteSet::contains(const Site& s) const {
  return std::find(sites_.begin(), sites_.end(), s) != sites_.end();
}

std::size_t SiteSet::index_of(const Site& s) const {
  const auto it = std::find(sites_.begin(), sites_.end(), s);
  if (it == sites_.end()) {
    std::ostringstream os;
    os << "site (";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ") is not in the lattice";
    throw Error(ErrorCode::site_not_in_lattice, os.str());
  }
  return static_cast<std::size_t>(it - sites_.begin());
}

SiteMask SiteSet::mask_of(std::span<const Site> sites) const {
  SiteMask m = 0;
  for (const auto& s : sites) m |= site_bit(index_of(s));
  return m;
}

SiteMask SiteSet::mask_of_indices(std::span<const std::size_t> indices) const {
  SiteMask m = 0;
  for (auto i : indices) {
    if (i >= size()) {
      throw Error(ErrorCode::site_not_in_lattice,
                  "site index " + std::to_string(i) + " is not in the lattice");
    }
    m |= site_bit(i);
  }
  return m;
}

std::vector<std::size_t> SiteSet::indices(SiteMask mask) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (mask & site_bit(i)) out.push_back(i);
  }
  return out;
}

void SiteSet::check_mask(SiteMask mask) const {
  if (!is_subset(mask, all())) {
    throw Error(ErrorCode::domain, "region is not a subset of the lattice");
  }
}

std::string SiteSet::describe(SiteMask mask) const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (auto i : indices(mask)) {
    os << (first ? "" : ",") << '(';
    for (std::size_t k = 0; k < sites_[i].size(); ++k) os << (k ? "," : "") << sites_[i][k];
    os << ')';
    first = false;
  }
  os << '}';
  return os.str();
}

// --- parity --------------------------------------------------------------

const char* parity_name(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::mixed: return "mixed";
  }
  return "mixed";
}

Parity parity_product(Parity a, Parity b) {
  if (a == Parity::mixed || b == Parity::mixed) return Parity::mixed;
  return a == b ? Parity::even : Parity::odd;
}

Matrix parity_conjugate(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double sc = state_parity(static_cast<std::size_t>(c));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out(r, c) *= sc * state_parity(static_cast<std::size_t>(r));
    }
  }
  return out;
}

double parity_defect(const Matrix& m, Parity parity) {
  if (parity == Parity::mixed || m.size() == 0) return 0.0;
  double largest = 0.0;
  double wrong = 0.0;
  // Even operators connect states of equal particle-number parity.
  const bool want_even = parity == Parity::even;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const bool col_odd = std::popcount(static_cast<std::uint64_t>(c)) & 1;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double v = std::norm(m(r, c));
      largest = std::max(largest, v);
      const bool same = (std::popcount(static_cast<std::uint64_t>(r)) & 1) == col_odd;
      if (same != want_even) wrong = std::max(wrong, v);
    }
  }
  return largest == 0.0 ? 0.0 : std::sqrt(wrong / largest);
}

Parity classify_parity(const Matrix& m, double tolerance) {
  if (parity_defect(m, Parity::even) <= tolerance) return Parity::even;
  if (parity_defect(m, Parity::odd) <= tolerance) return Parity::odd;
  return Parity::mixed;
}

// --- FockOperator --------------------------------------------------------

FockOperator::FockOperator(SiteSetPtr ambient, SiteMask support, Matrix matrix, Parity parity)
    : ambient_(std::move(ambient)), support_(support), parity_(parity) {
  if (!ambient_) throw Error(ErrorCode::domain, "FockOperator requires a SiteSet");
  const auto dim = static_cast<Eigen::Index>(ambient_->dimension());
  if (matrix.rows() != dim || matrix.cols() != dim) {
    throw Error(ErrorCode::dimension_mismatch,
                "matrix dimension does not match 2^|Lambda| = " + std::to_string(dim));
  }
  ambient_->check_mask(support_);
  if (parity_defect(matrix, parity_) > kParityTolerance) {
    throw Error(ErrorCode::parity,
                std::string("matrix is not ") + parity_name(parity_) + " under Theta");
  }
  matrix_ = std::make_shared<const Matrix>(std::move(matrix));
}

FockOperator FockOperator::from_matrix(SiteSetPtr ambient, SiteMask support, Matrix matrix) {
  const Parity p = classify_parity(matrix);
  return FockOperator(std::move(ambient), support, std::move(matrix), p);
}

FockOperator FockOperator::projected(SiteSetPtr ambient, SiteMask support, Matrix matrix,
                                     Parity parity) {
  if (parity != Parity::mixed) {
    const bool want_even = parity == Parity::even;
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        const bool same = state_parity(static_cast<std::size_t>(r)) ==
                          state_parity(static_cast<std::size_t>(c));
        if (same != want_even) matrix(r, c) = 0.0;
      }
    }
  }
  return FockOperator(std::move(ambient), support, std::move(matrix), parity);
}

FockOperator FockOperator::identity(SiteSetPtr ambient) {
  const auto dim = static_cast<Eigen::Index>(ambient->dimension());
  return FockOperator(std::move(ambient), 0, Matrix::Identity(dim, dim), Parity::even);
}

FockOperator FockOperator::zero(SiteSetPtr ambient) {
  const auto dim = static_cast<Eigen::Index>(ambient->dimension());
  return FockOperator(std::move(ambient), 0, Matrix::Zero(dim, dim), Parity::even);
}

FockOperator FockOperator::adjoint() const {
  return FockOperator(ambient_, support_, matrix_->adjoint(), parity_);
}

FockOperator FockOperator::scaled(cplx factor) const {
  return FockOperator(ambient_, support_, factor * *matrix_, parity_);
}

FockOperator FockOperator::widened(SiteMask support) const {
  FockOperator out = *this;
  ambient_->check_mask(support);
  out.support_ = support_ | support;
  return out;
}

Vector FockOperator::apply(const Vector& x) const {
  if (x.size() != matrix_->cols()) {
    throw Error(ErrorCode::dimension_mismatch, "vector length does not match Fock dimension");
  }
  return *matrix_ * x;
}

LinearMap FockOperator::as_linear_map() const {
  auto m = matrix_;
  return [m](std::span<const cplx> in, std::span<cplx> out) {
    Eigen::Map<const Vector> x(in.data(), static_cast<Eigen::Index>(in.size()));
    Eigen::Map<Vector> y(out.data(), static_cast<Eigen::Index>(out.size()));
    y.noalias() = *m * x;
  };
}

bool FockOperator::same_ambient(const FockOperator& other) const {
  return ambient_ == other.ambient_ || *ambient_ == *other.ambient_;
}

namespace {

Parity parity_sum(const FockOperator& a, const FockOperator& b) {
  if (a.parity() == b.parity()) return a.parity();
  return Parity::mixed;
}

}  // namespace

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
  require_same_ambient(a, b);
  Matrix m = a.matrix() + b.matrix();
  const Parity p = parity_sum(a, b);
  if (p == Parity::mixed) return FockOperator::from_matrix(a.ambient(), a.support() | b.support(), std::move(m));
  return FockOperator::projected(a.ambient(), a.support() | b.support(), std::move(m), p);
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) {
  return a + b.scaled(-1.0);
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_same_ambient(a, b);
  return FockOperator::projected(a.ambient(), a.support() | b.support(),
                                 multiply(a.matrix(), b.matrix()),
                                 parity_product(a.parity(), b.parity()));
}

FockOperator operator*(cplx factor, const FockOperator& a) { return a.scaled(factor); }

// --- generators ----------------------------------------------------------

FockOperator build_annihilator(const SiteSetPtr& lambda, std::size_t index) {
  if (index >= lambda->size()) {
    throw Error(ErrorCode::site_not_in_lattice,
                "site index " + std::to_string(index) + " is not in the lattice");
  }
  const auto dim = lambda->dimension();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const SiteMask bit = site_bit(index);
  for (std::size_t s = 0; s < dim; ++s) {
    if (s & bit) {
      m(static_cast<Eigen::Index>(s ^ bit), static_cast<Eigen::Index>(s)) = jw_sign(s, index);
    }
  }
  return FockOperator(lambda, bit, std::move(m), Parity::odd);
}

FockOperator build_annihilator(const SiteSetPtr& lambda, const Site& x) {
  return build_annihilator(lambda, lambda->index_of(x));
}

FockOperator build_creator(const SiteSetPtr& lambda, std::size_t index) {
  return build_annihilator(lambda, index).adjoint();
}

FockOperator build_creator(const SiteSetPtr& lambda, const Site& x) {
  return build_creator(lambda, lambda->index_of(x));
}

FockOperator number_operator(const SiteSetPtr& lambda, SiteMask region) {
  lambda->check_mask(region);
  const auto dim = lambda->dimension();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) =
        static_cast<double>(std::popcount(static_cast<SiteMask>(s) & region));
  }
  return FockOperator(lambda, region, std::move(m), Parity::even);
}

FockOperator parity_operator(const SiteSetPtr& lambda, SiteMask region) {
  lambda->check_mask(region);
  const auto dim = lambda->dimension();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) =
        state_parity(static_cast<std::size_t>(static_cast<SiteMask>(s) & region));
  }
  return FockOperator(lambda, region, std::move(m), Parity::even);
}

std::pair<FockOperator, FockOperator> parity_decompose(const FockOperator& a) {
  const Matrix theta = parity_conjugate(a.matrix());
  FockOperator plus(a.ambient(), a.support(), 0.5 * (a.matrix() + theta), Parity::even);
  FockOperator minus(a.ambient(), a.support(), 0.5 * (a.matrix() - theta), Parity::odd);
  return {std::move(plus), std::move(minus)};
}

Parity MonomialLabel::parity() const {
  int odd = 0;
  for (auto s : symbols) {
    if (s == MonomialSymbol::annihilate || s == MonomialSymbol::create) ++odd;
  }
  return (odd % 2) ? Parity::odd : Parity::even;
}

FockOperator monomial(const SiteSetPtr& lambda, const MonomialLabel& label) {
  if (label.symbols.size() != lambda->size()) {
    throw Error(ErrorCode::domain, "monomial label length " +
                                       std::to_string(label.symbols.size()) +
                                       " does not match |Lambda| = " +
                                       std::to_string(lambda->size()));
  }
  FockOperator out = FockOperator::identity(lambda);
  for (std::size_t i = 0; i < label.symbols.size(); ++i) {
    switch (label.symbols[i]) {
      case MonomialSymbol::identity: break;
      case MonomialSymbol::annihilate: out = out * build_annihilator(lambda, i); break;
      case MonomialSymbol::create: out = out * build_creator(lambda, i); break;
      case MonomialSymbol::number:
        out = out * (build_creator(lambda, i) * build_annihilator(lambda, i));
        break;
    }
  }
  return FockOperator(lambda, out.support(), out.matrix(), label.parity());
}

double op_norm(const FockOperator& a) { return spectral_norm(a.matrix()); }

FockOperator commutator(const FockOperator& a, const FockOperator& b) {
  require_same_ambient(a, b);
  Matrix m = multiply(a.matrix(), b.matrix()) - multiply(b.matrix(), a.matrix());
  return FockOperator::projected(a.ambient(), a.support() | b.support(), std::move(m),
                                 parity_product(a.parity(), b.parity()));
}

FockOperator anticommutator(const FockOperator& a, const FockOperator& b) {
  require_same_ambient(a, b);
  Matrix m = multiply(a.matrix(), b.matrix()) + multiply(b.matrix(), a.matrix());
  return FockOperator::projected(a.ambient(), a.support() | b.support(), std::move(m),
                                 parity_product(a.parity(), b.parity()));
}

double locality_defect(const FockOperator& a, SiteMask region) {
  const auto& lambda = a.ambient();
  lambda->check_mask(region);
  const auto [plus, minus] = parity_decompose(a);
  double worst = 0.0;
  for (auto y : lambda->indices(lambda->all() & ~region)) {
    const FockOperator ay = build_annihilator(lambda, y);
    const FockOperator cy = ay.adjoint();
    for (const auto* g : {&ay, &cy}) {
      worst = std::max(worst, op_norm(commutator(plus, *g)));
      worst = std::max(worst, op_norm(anticommutator(minus, *g)));
    }
  }
  return worst;
}

// --- signed permutations -------------------------------------------------

SignedPermutation SignedPermutation::identity(std::size_t dimension) {
  SignedPermutation p;
  p.target.resize(dimension);
  p.sign.assign(dimension, 1.0);
  for (std::size_t s = 0; s < dimension; ++s) p.target[s] = static_cast<std::uint32_t>(s);
  return p;
}

Matrix SignedPermutation::dense() const {
  const auto dim = static_cast<Eigen::Index>(target.size());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) m(target[static_cast<std::size_t>(s)], s) = sign[static_cast<std::size_t>(s)];
  return m;
}

Matrix SignedPermutation::conjugate(const Matrix& m) const {
  const auto dim = static_cast<Eigen::Index>(target.size());
  Matrix out(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto tj = static_cast<Eigen::Index>(target[static_cast<std::size_t>(j)]);
    const double sj = sign[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < dim; ++i) {
      out(i, j) = sign[static_cast<std::size_t>(i)] * sj *
                  m(static_cast<Eigen::Index>(target[static_cast<std::size_t>(i)]), tj);
    }
  }
  return out;
}

cplx SignedPermutation::trace_against(const Matrix& m) const {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    acc += sign[i] * m(static_cast<Eigen::Index>(target[i]), static_cast<Eigen::Index>(i));
  }
  return acc;
}

SignedPermutation SignedPermutation::then_left_of(const SignedPermutation& rhs) const {
  SignedPermutation out;
  out.target.resize(rhs.target.size());
  out.sign.resize(rhs.target.size());
  for (std::size_t s = 0; s < rhs.target.size(); ++s) {
    const auto mid = rhs.target[s];
    out.target[s] = target[mid];
    out.sign[s] = rhs.sign[s] * sign[mid];
  }
  return out;
}

SignedPermutation single_site_unitary(const SiteSet& lambda, std::size_t index, int k) {
  if (index >= lambda.size()) {
    throw Error(ErrorCode::site_not_in_lattice,
                "site index " + std::to_string(index) + " is not in the lattice");
  }
  if (k < 0 || k > 3) throw Error(ErrorCode::domain, "Krauss label must be in {0,1,2,3}");
  const auto dim = lambda.dimension();
  SignedPermutation p = SignedPermutation::identity(dim);
  if (k == 0) return p;
  const SiteMask bit = site_bit(index);
  for (std::size_t s = 0; s < dim; ++s) {
    const bool occupied = (s & bit) != 0;
    switch (k) {
      case 1:
        p.target[s] = static_cast<std::uint32_t>(s ^ bit);
        p.sign[s] = jw_sign(s, index);
        break;
      case 2:
        p.target[s] = static_cast<std::uint32_t>(s ^ bit);
        p.sign[s] = occupied ? -jw_sign(s, index) : jw_sign(s, index);
        break;
      default:
        p.sign[s] = occupied ? -1.0 : 1.0;
        break;
    }
  }
  return p;
}

SignedPermutation unitary_string(const SiteSet& lambda, std::span<const std::size_t> indices,
                                 std::span<const std::uint8_t> labels) {
  if (indices.size() != labels.size()) {
    throw Error(ErrorCode::domain, "unitary string: one label per site required");
  }
  SignedPermutation acc = SignedPermutation::identity(lambda.dimension());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (labels[i] == 0) continue;
    acc = acc.then_left_of(single_site_unitary(lambda, indices[i], labels[i]));
  }
  return acc;
}

FockOperator embed(const FockOperator& a, const SiteSetPtr& larger) {
  const SiteSet& small = *a.ambient();
  if (small.size() > 8) {
    throw Error(ErrorCode::size_limit, "embed supports at most 8 source sites");
  }
  std::vector<std::size_t> src(small.size());
  std::vector<std::size_t> dst(small.size());
  for (std::size_t i = 0; i < small.size(); ++i) {
    src[i] = i;
    dst[i] = larger->index_of(small.site(i));
  }
  const auto dim_small = static_cast<double>(small.dimension());
  const auto dim_large = static_cast<Eigen::Index>(larger->dimension());
  Matrix out = Matrix::Zero(dim_large, dim_large);
  std::vector<std::uint8_t> labels(small.size(), 0);
  const std::size_t count = std::size_t{1} << (2 * small.size());
  // Expand in the trace-orthogonal basis of unitary strings and rebuild each
  // string with the same site order on the larger Fock space.
  for (std::size_t code = 0; code < count; ++code) {
    for (std::size_t i = 0; i < small.size(); ++i) labels[i] = (code >> (2 * i)) & 3U;
    const cplx coeff = unitary_string(small, src, labels).trace_against(a.matrix()) / dim_small;
    if (std::abs(coeff) == 0.0) continue;
    const SignedPermutation u = unitary_string(*larger, dst, labels);
    for (Eigen::Index s = 0; s < dim_large; ++s) {
      out(u.target[static_cast<std::size_t>(s)], s) += coeff * u.sign[static_cast<std::size_t>(s)];
    }
  }
  SiteMask support = 0;
  for (auto i : small.indices(a.support())) support |= site_bit(dst[i]);
  return FockOperator(larger, support, std::move(out), a.parity());
}

}  // namespace fermicert

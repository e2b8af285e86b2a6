// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "fermicert/error.hpp"
#include "fermicert/fock.hpp"
#include "fermicert/models.hpp"
#include "oracles.hpp"

using namespace fermicert;

namespace {

double diff(const Matrix& a, const Matrix& b) { return oracle::norm(a - b); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::config;
}

}  // namespace

TEST_CASE("site sets index, mask and reject bad input") {
  const auto lambda = SiteSet::chain(4);
  CHECK(lambda->size() == 4);
  CHECK(lambda->dimension() == 16);
  CHECK(lambda->index_of({2}) == 2);
  CHECK(code_of([&] { lambda->index_of({9}); }) == ErrorCode::site_not_in_lattice);
  CHECK(code_of([&] { lambda->check_mask(SiteMask{1} << 4); }) == ErrorCode::domain);
  CHECK(code_of([] { SiteSet({{0}, {0}}); }) == ErrorCode::domain);
  CHECK(code_of([] { SiteSet::chain(21); }) == ErrorCode::size_limit);
  CHECK(lambda->describe(0b0101) == "{(0),(2)}");
  const std::vector<std::size_t> idx = {1, 3};
  CHECK(lambda->mask_of_indices(idx) == 0b1010);
  CHECK(lambda->indices(0b1010) == idx);
}

TEST_CASE("annihilators match the Kronecker-product Jordan-Wigner oracle") {
  for (int l = 1; l <= 6; ++l) {
    const auto lambda = SiteSet::chain(static_cast<std::size_t>(l));
    for (int x = 0; x < l; ++x) {
      const FockOperator a = build_annihilator(lambda, static_cast<std::size_t>(x));
      CHECK(diff(a.matrix(), oracle::annihilator(l, x)) == 0.0);
      CHECK(a.parity() == Parity::odd);
      CHECK(a.support() == site_bit(static_cast<std::size_t>(x)));
      CHECK(diff(build_creator(lambda, Site{x}).matrix(), oracle::creator(l, x)) == 0.0);
    }
  }
}

TEST_CASE("canonical anticommutation relations hold") {
  for (std::size_t l = 2; l <= 6; ++l) {
    const auto lambda = SiteSet::chain(l);
    const auto one = FockOperator::identity(lambda);
    for (std::size_t x = 0; x < l; ++x) {
      const auto ax = build_annihilator(lambda, x);
      for (std::size_t y = 0; y < l; ++y) {
        const auto ay = build_annihilator(lambda, y);
        const Matrix expected = x == y ? one.matrix() : Matrix::Zero(one.matrix().rows(), one.matrix().cols());
        CHECK(diff(anticommutator(ax, ay.adjoint()).matrix(), expected) <= 1e-12);
        CHECK(op_norm(anticommutator(ax, ay)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("number operator spectrum counts occupations") {
  const auto lambda = SiteSet::chain(3);
  const auto ev = oracle::eigenvalues(number_operator(lambda, lambda->all()).matrix());
  const std::vector<double> expected = {0, 1, 1, 1, 2, 2, 2, 3};
  REQUIRE(ev.size() == expected.size());
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  CHECK(diff(number_operator(lambda, 0b010).matrix(), oracle::number(3, 1)) == 0.0);
}

TEST_CASE("parity tags are validated and decomposed") {
  const auto lambda = SiteSet::chain(3);
  const auto a0 = build_annihilator(lambda, 0);
  const auto n1 = number_operator(lambda, 0b010);
  CHECK(code_of([&] { FockOperator(lambda, 1, a0.matrix(), Parity::even); }) == ErrorCode::parity);
  CHECK(code_of([&] { FockOperator(lambda, 1, Matrix::Identity(4, 4), Parity::even); }) ==
        ErrorCode::dimension_mismatch);
  CHECK((a0 * n1).parity() == Parity::odd);
  CHECK((a0 * a0.adjoint()).parity() == Parity::even);
  const auto mixed = a0 + n1;
  CHECK(mixed.parity() == Parity::mixed);
  const auto [plus, minus] = parity_decompose(mixed);
  CHECK(plus.parity() == Parity::even);
  CHECK(minus.parity() == Parity::odd);
  CHECK(diff(plus.matrix(), n1.matrix()) <= 1e-15);
  CHECK(diff(minus.matrix(), a0.matrix()) <= 1e-15);
  // Theta(A) = theta A theta with theta = (-1)^N.
  const auto theta = parity_operator(lambda, lambda->all());
  CHECK(diff(parity_conjugate(mixed.matrix()), theta.matrix() * mixed.matrix() * theta.matrix()) <= 1e-15);
  CHECK(classify_parity(mixed.matrix()) == Parity::mixed);
}

TEST_CASE("monomials follow the site ordering") {
  const auto lambda = SiteSet::chain(3);
  MonomialLabel label{{MonomialSymbol::create, MonomialSymbol::identity, MonomialSymbol::annihilate}};
  CHECK(label.parity() == Parity::even);
  const auto m = monomial(lambda, label);
  CHECK(diff(m.matrix(), oracle::creator(3, 0) * oracle::annihilator(3, 2)) <= 1e-15);
  CHECK(m.support() == 0b101);
  MonomialLabel bad{{MonomialSymbol::number}};
  CHECK(code_of([&] { monomial(lambda, bad); }) == ErrorCode::domain);
}

TEST_CASE("disjoint even observables commute and disjoint odd ones anticommute") {
  std::mt19937_64 rng(11);
  const auto lambda = SiteSet::chain(5);
  for (int k = 0; k < 10; ++k) {
    const auto even_a = random_local_operator(lambda, 0b00011, Parity::even, rng);
    const auto odd_a = random_local_operator(lambda, 0b00011, Parity::odd, rng);
    const auto even_b = random_local_operator(lambda, 0b11000, Parity::even, rng);
    const auto odd_b = random_local_operator(lambda, 0b11100, Parity::odd, rng);
    CHECK(op_norm(commutator(even_a, even_b)) <= 1e-12);
    CHECK(op_norm(commutator(even_a, odd_b)) <= 1e-12);
    CHECK(op_norm(commutator(odd_a, even_b)) <= 1e-12);
    CHECK(op_norm(anticommutator(odd_a, odd_b)) <= 1e-12);
    CHECK(op_norm(commutator(odd_a, odd_b)) > 1e-3);
  }
}

TEST_CASE("locality defect detects support") {
  std::mt19937_64 rng(3);
  const auto lambda = SiteSet::chain(4);
  const auto a = random_local_operator(lambda, 0b0110, Parity::mixed, rng);
  CHECK(locality_defect(a, 0b0110) <= 1e-12);
  CHECK(locality_defect(a, 0b0010) > 1e-3);
  CHECK(locality_defect(build_annihilator(lambda, 3), 0b0111) > 0.5);
}

TEST_CASE("embedding into a larger site set preserves the abstract operator") {
  // Sub-lattice {3, 1} in reversed order inside the chain {0,1,2,3}.
  const auto sub = std::make_shared<const SiteSet>(std::vector<Site>{{3}, {1}});
  const auto big = SiteSet::chain(4);
  const auto a3 = build_annihilator(sub, Site{3});
  CHECK(diff(embed(a3, big).matrix(), build_annihilator(big, 3).matrix()) <= 1e-14);
  const auto prod = build_creator(sub, Site{3}) * build_annihilator(sub, Site{1});
  const auto expected = build_creator(big, 3) * build_annihilator(big, 1);
  CHECK(diff(embed(prod, big).matrix(), expected.matrix()) <= 1e-14);
  CHECK(embed(prod, big).support() == 0b1010);
  CHECK(code_of([&] { embed(a3, SiteSet::chain(2)); }) == ErrorCode::site_not_in_lattice);
}

TEST_CASE("signed permutations reproduce the single-site unitaries") {
  const auto lambda = SiteSet::chain(3);
  const Matrix a = oracle::annihilator(3, 1);
  const Matrix c = a.adjoint();
  const Matrix id = Matrix::Identity(8, 8);
  const Matrix expected[4] = {id, c + a, c - a, id - 2.0 * c * a};
  std::mt19937_64 rng(5);
  const auto m = random_local_operator(lambda, lambda->all(), Parity::mixed, rng).matrix();
  for (int k = 0; k < 4; ++k) {
    const auto u = single_site_unitary(*lambda, 1, k);
    CHECK(diff(u.dense(), expected[k]) == 0.0);
    CHECK(diff(u.conjugate(m), expected[k].adjoint() * m * expected[k]) <= 1e-14);
    CHECK(std::abs(u.trace_against(m) - (expected[k].adjoint() * m).trace()) <= 1e-14);
  }
  const std::vector<std::size_t> sites = {0, 2};
  const std::vector<std::uint8_t> labels = {1, 3};
  const auto s = unitary_string(*lambda, sites, labels);
  CHECK(diff(s.dense(), single_site_unitary(*lambda, 0, 1).dense() *
                            single_site_unitary(*lambda, 2, 3).dense()) == 0.0);
}

TEST_CASE("operators combine only on a common site set") {
  const auto a = build_annihilator(SiteSet::chain(2), 0);
  const auto b = build_annihilator(SiteSet::chain(3), 0);
  CHECK(code_of([&] { (void)(a + b); }) == ErrorCode::dimension_mismatch);
  CHECK(op_norm(a) == doctest::Approx(1.0));
  CHECK(op_norm(FockOperator::zero(SiteSet::chain(2))) == 0.0);
}

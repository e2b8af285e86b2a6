// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "fermicert/dynamics.hpp"
#include "fermicert/error.hpp"
#include "fermicert/gap.hpp"
#include "fermicert/models.hpp"
#include "oracles.hpp"

using namespace fermicert;

TEST_CASE("two-site hopping spectrum") {
  const auto h = local_hamiltonian(hopping_chain(2, 1.0, 0.0), 0.0);
  const auto ev = oracle::eigenvalues(h.matrix());
  const std::vector<double> expected = {-1, 0, 0, 1};
  for (std::size_t k = 0; k < 4; ++k) CHECK(ev[k] == doctest::Approx(expected[k]).epsilon(1e-14));
  CHECK_THROWS_AS(hopping_chain(2, 1.0, 0.0, Boundary::periodic), Error);
  CHECK_THROWS_AS(hopping_chain(1, 1.0, 0.0), Error);
  const auto ring = hopping_chain(4, 1.0, 0.0, Boundary::periodic);
  // Ring of 4: one-body levels 2 cos(2 pi k / 4) = {2, 0, 0, -2}.
  const auto ring_ev = oracle::eigenvalues(local_hamiltonian(ring, 0.0).matrix());
  CHECK(ring_ev.front() == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("ramped hopping follows its profile") {
  const auto phi = ramped_hopping_chain(3, 0.5, 1.5, 0.0, 1.0);
  CHECK_FALSE(phi.is_time_independent());
  CHECK(phi.value_norm(0b011, 0.5) == doctest::Approx(1.0));
  CHECK(phi.value_norm(0b011, 3.0) == doctest::Approx(1.5));
  CHECK(phi.value_norm(0b011, -1.0) == doctest::Approx(0.5));
}

TEST_CASE("Kitaev chain terms are shifted and frustration-free") {
  KitaevParams p;
  CHECK(p.resolved_mu() == doctest::Approx(1.2));
  const auto phi = kitaev_chain(5, p);
  CHECK(phi.is_even());
  for (SiteMask z : phi.supports()) {
    CHECK(oracle::eigenvalues(phi.value(z, 0.0).matrix()).front() == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(frustration_free_check(phi).frustration_free);
  p.pairing = 1.5;
  CHECK_THROWS_AS(kitaev_chain(5, p), Error);
  KitaevParams w;
  w.bond_weights = {1, 2};
  CHECK_THROWS_AS(kitaev_chain(5, w), Error);
}

TEST_CASE("band operators satisfy the CAR") {
  const auto orbitals = brick_wall_orbitals(6, 0.4, 0.9);
  orbitals.validate();
  const auto modes = band_operators(orbitals);
  REQUIRE(modes.valence.size() == 3);
  REQUIRE(modes.conduction.size() == 3);
  std::vector<FockOperator> all = modes.valence;
  all.insert(all.end(), modes.conduction.begin(), modes.conduction.end());
  const auto lambda = orbitals.graph.sites();
  const auto one = FockOperator::identity(lambda);
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(locality_defect(all[i], all[i].support()) <= 1e-14);
    for (std::size_t j = 0; j < all.size(); ++j) {
      const auto ac = anticommutator(all[i], all[j].adjoint());
      CHECK(oracle::norm(ac.matrix() - (i == j ? 1.0 : 0.0) * one.matrix()) <= 1e-13);
      CHECK(op_norm(anticommutator(all[i], all[j])) <= 1e-13);
    }
  }
  for (std::size_t k = 0; k < orbitals.valence_centers.size(); ++k) {
    CHECK((modes.valence[k].support() & ~orbitals.ball(orbitals.valence_centers[k])) == 0);
  }
}

TEST_CASE("orbital validation names the violated invariant") {
  auto orbitals = brick_wall_orbitals(4, 0.4, 0.9);
  orbitals.valence[0] *= 2.0;
  CHECK_THROWS_AS(orbitals.validate(), Error);
  auto overlap = brick_wall_orbitals(4, 0.4, 0.9);
  overlap.conduction[0] = overlap.valence[0];
  CHECK_THROWS_AS(overlap.validate(), Error);
  auto missing = brick_wall_orbitals(4, 0.4, 0.9);
  missing.valence_centers.pop_back();
  CHECK_THROWS_AS(missing.validate(), Error);
}

TEST_CASE("flat band models have gap set by the band weights") {
  const auto phi = flat_band_model(brick_wall_orbitals(4, 0.4, 0.9), 1.0, 0.5);
  const auto ev = spectrum(local_hamiltonian(phi, 0.0));
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(0.5).epsilon(1e-12));
  const auto closing = spectrum(local_hamiltonian(closing_flat_band(4, 0.25), 0.0));
  CHECK(closing[1] - closing[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("random models are reproducible from the seed") {
  const auto lambda = SiteSet::chain(5);
  const auto a = random_even_interaction(lambda, 1, 0.7, 42);
  const auto b = random_even_interaction(lambda, 1, 0.7, 42);
  const auto c = random_even_interaction(lambda, 1, 0.7, 43);
  REQUIRE(a.terms().size() == b.terms().size());
  double same = 0.0, different = 0.0;
  for (std::size_t k = 0; k < a.terms().size(); ++k) {
    same = std::max(same, oracle::norm(a.terms()[k].op.matrix() - b.terms()[k].op.matrix()));
    different = std::max(different, oracle::norm(a.terms()[k].op.matrix() - c.terms()[k].op.matrix()));
    CHECK(a.terms()[k].op_norm() <= 0.7 + 1e-12);
    CHECK(a.terms()[k].op.parity() == Parity::even);
  }
  CHECK(same == 0.0);
  CHECK(different > 1e-3);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double u = uniform01(rng);
    CHECK((u >= 0.0 && u < 1.0));
  }
  std::mt19937_64 r1(9), r2(9);
  const auto op = random_local_operator(lambda, 0b00110, Parity::odd, r1);
  CHECK(op.parity() == Parity::odd);
  CHECK(oracle::norm(op.matrix() - random_local_operator(lambda, 0b00110, Parity::odd, r2).matrix()) == 0.0);
  // Unit tracial 2-norm.
  CHECK((op.matrix().adjoint() * op.matrix()).trace().real() / 32.0 == doctest::Approx(1.0).epsilon(1e-12));
}

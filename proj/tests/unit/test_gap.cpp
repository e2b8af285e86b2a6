// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "doctest.h"
#include "fermicert/dynamics.hpp"
#include "fermicert/error.hpp"
#include "fermicert/gap.hpp"
#include "fermicert/models.hpp"
#include "oracles.hpp"

using namespace fermicert;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::config;
}

// Kernel projection of a Hermitian matrix by an independent eigensolver.
oracle::Mat kernel_of(const oracle::Mat& h, double tol) {
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(h);
  oracle::Mat p = oracle::Mat::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    if (es.eigenvalues()[k] <= tol) p += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  }
  return p;
}

// max_n ||E_n g_{n+1} E_n|| with G_n = ker H_n, g_n = ker h_n, E_0 = 1 - G_1
// and E_n = G_n - G_{n+1}.
double epsilon_squared_oracle(const HamiltonianSequence& seq) {
  auto ker = [](const FockOperator& h) {
    return kernel_of(h.matrix(), 1e-8 * std::max(1.0, oracle::norm(h.matrix())));
  };
  const auto dim = seq.partial_sums().front().matrix().rows();
  std::vector<oracle::Mat> big{oracle::Mat::Identity(dim, dim)};
  std::vector<oracle::Mat> small{oracle::Mat::Identity(dim, dim)};
  for (const auto& h : seq.partial_sums()) big.push_back(ker(h));
  for (const auto& h : seq.increments()) small.push_back(ker(h));
  double eps2 = 0.0;
  for (std::size_t n = 0; n + 1 < big.size(); ++n) {
    const oracle::Mat e = big[n] - big[n + 1];
    eps2 = std::max(eps2, oracle::norm(e * small[n + 1] * e));
  }
  return eps2;
}

}  // namespace

TEST_CASE("spectrum of small models") {
  const auto ev = spectrum(local_hamiltonian(hopping_chain(2, 1.0, 0.0), 0.0));
  const std::vector<double> expected = {-1, 0, 0, 1};
  for (std::size_t k = 0; k < 4; ++k) CHECK(ev[static_cast<Eigen::Index>(k)] == doctest::Approx(expected[k]).epsilon(1e-14));
  const auto lambda = SiteSet::chain(2);
  CHECK(code_of([&] { spectrum(build_annihilator(lambda, 0)); }) == ErrorCode::not_hermitian);
  RealVector gapped(4);
  gapped << 0.0, 1e-12, 0.7, 2.0;
  CHECK(*spectral_gap(gapped, 1e-9) == doctest::Approx(0.7));
  RealVector flat(2);
  flat << 1.0, 1.0;
  CHECK_FALSE(spectral_gap(flat, 1e-9).has_value());
}

TEST_CASE("frustration-freeness") {
  const auto kitaev = frustration_free_check(kitaev_chain(4));
  CHECK(kitaev.frustration_free);
  CHECK(std::abs(kitaev.residual) <= kFrustrationTolerance);
  CHECK(kitaev.annihilation_residual <= 1e-9);
  CHECK(kitaev.ground_degeneracy == 2);
  // Open hopping chain: one-body levels 2 cos(k pi / 5), ground fills the negative ones.
  const auto hop = frustration_free_check(hopping_chain(4, 1.0, 0.0));
  CHECK_FALSE(hop.frustration_free);
  CHECK(hop.ground_energy == doctest::Approx(-2.0 * (std::cos(M_PI / 5) + std::cos(2 * M_PI / 5))).epsilon(1e-12));
  CHECK(hop.termwise_sum == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(hop.residual > 0.7);
}

TEST_CASE("kernel projections and their failure modes") {
  const auto lambda = SiteSet::chain(3);
  const auto n = number_operator(lambda, lambda->all());
  const auto p = kernel_projection(n);
  CHECK(projection_rank(p) == 1);
  CHECK(oracle::norm(p.matrix() - kernel_of(n.matrix(), 1e-8)) <= 1e-14);
  CHECK(projection_rank(kernel_projection(number_operator(lambda, 0b001))) == 4);
  const auto shifted = n - FockOperator::identity(lambda);
  CHECK(code_of([&] { kernel_projection(shifted); }) == ErrorCode::precondition);
  const FockOperator tiny(lambda, 0b001, 1e-8 * number_operator(lambda, 0b001).matrix(), Parity::even);
  CHECK(code_of([&] { kernel_projection(tiny); }) == ErrorCode::ambiguous_kernel);
}

TEST_CASE("resolution family from nested kernels") {
  const auto lambda = SiteSet::chain(3);
  std::vector<FockOperator> kernels;
  for (SiteMask m : {SiteMask{0b001}, SiteMask{0b011}, SiteMask{0b111}}) {
    kernels.push_back(kernel_projection(number_operator(lambda, m)));
  }
  const auto family = resolution_family(kernels);
  REQUIRE(family.size() == 4);
  CHECK(projection_rank(family[0]) == 4);
  CHECK(projection_rank(family[3]) == 1);
  const auto d = resolution_defects(family);
  CHECK(d.self_adjoint <= 1e-14);
  CHECK(d.orthogonality <= 1e-14);
  CHECK(d.completeness <= 1e-14);
  const std::vector<FockOperator> crossed = {kernel_projection(number_operator(lambda, 0b001)),
                                             kernel_projection(number_operator(lambda, 0b010))};
  CHECK(code_of([&] { resolution_family(crossed); }) == ErrorCode::nesting);
}

TEST_CASE("martingale certificate for the Kitaev chain") {
  const auto seq = left_to_right_sequence(kitaev_chain(6));
  CHECK(seq.length() == 5);
  CHECK(seq.monotonicity_defect() >= -1e-12);
  const auto cert = martingale_certificate(seq);
  CHECK(cert.gamma == doctest::Approx(2.0).epsilon(1e-10));
  REQUIRE(cert.ell.has_value());
  CHECK(*cert.ell == 1);
  CHECK(cert.epsilon * cert.epsilon == doctest::Approx(epsilon_squared_oracle(seq)).epsilon(1e-10));
  REQUIRE(cert.bound.has_value());
  const double x = cert.epsilon * std::sqrt(1.0 + static_cast<double>(*cert.ell));
  CHECK(*cert.bound == cert.gamma * (1.0 - x) * (1.0 - x));
  REQUIRE(cert.exact_gap.has_value());
  CHECK(*cert.bound <= *cert.exact_gap);
  CHECK(cert.ground_degeneracy == 2);
  CHECK(cert.defect_i <= 1e-10);
  CHECK(cert.defect_ii <= 1e-10);
  CHECK(cert.defect_iii <= 1e-10);
  CHECK(cert.steps.size() == 5);
}

TEST_CASE("martingale certificate for commuting sequences is sharp") {
  const auto cert = martingale_certificate(left_to_right_sequence(number_chain(4)));
  CHECK(cert.gamma == doctest::Approx(1.0));
  CHECK(*cert.ell == 0);
  CHECK(cert.epsilon == 0.0);
  CHECK(*cert.bound == doctest::Approx(1.0));
  CHECK(*cert.exact_gap == doctest::Approx(1.0));
}

TEST_CASE("sequences reject decreasing increments") {
  const auto lambda = SiteSet::chain(2);
  std::vector<FockOperator> incs = {number_operator(lambda, 0b01),
                                    FockOperator::zero(lambda) - number_operator(lambda, 0b10)};
  CHECK(code_of([&] { HamiltonianSequence::from_increments(incs); }) == ErrorCode::precondition);
}

TEST_CASE("sandwich constants") {
  const auto seq = left_to_right_sequence(kitaev_chain(6));
  const auto& h = seq.partial_sums().back();
  const auto same = sandwich_check(h, h);
  CHECK(same.ok);
  CHECK(same.c == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(same.big_c == doctest::Approx(1.0).epsilon(1e-9));
  const FockOperator twice(h.ambient(), h.support(), 2.0 * h.matrix(), Parity::even);
  const auto doubled = sandwich_check(twice, h);
  CHECK(doubled.c == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(doubled.big_c == doctest::Approx(2.0).epsilon(1e-9));
  KitaevParams weighted;
  weighted.bond_weights = {2, 1, 2, 1, 2};
  const auto w = sandwich_check(local_hamiltonian(kitaev_chain(6, weighted), 0.0), h);
  CHECK(w.ok);
  CHECK(w.c >= 1.0 - 1e-9);
  CHECK(w.big_c <= 2.0 + 1e-9);
  const auto bad = sandwich_check(local_hamiltonian(hopping_chain(6, 1.0, 0.0), 0.0), h);
  CHECK_FALSE(bad.ok);
  CHECK(bad.witness_residual > 1e-6);
}

TEST_CASE("projection flow along a gapped path") {
  const auto grid = uniform_grid(0.0, 1.0, 20);
  const auto report = projection_flow(
      std::function<Interaction(double)>([](double s) { return rotated_flat_band(4, s); }), grid, 0.5);
  REQUIRE(report.points.size() == grid.size());
  CHECK(report.rank_constant);
  CHECK(report.max_defect <= 1e-6);
  CHECK(report.points.front().defect == 0.0);
  for (const auto& p : report.points) {
    CHECK(p.rank == 1);
    CHECK(p.gap == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.trace == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(report.max_unitarity_defect <= 1e-10);
}

TEST_CASE("projection flow stops at a gap closure") {
  const auto grid = uniform_grid(0.0, 1.0, 10);
  try {
    projection_flow(std::function<Interaction(double)>([](double s) { return closing_flat_band(4, s); }),
                    grid, 0.25);
    FAIL("expected a gap closure");
  } catch (const GapClosure& e) {
    CHECK(e.code() == ErrorCode::gap_closure);
    CHECK(e.location == doctest::Approx(0.375).epsilon(1e-6));
    CHECK(e.grid_point == doctest::Approx(0.4));
    CHECK(e.gap < 0.25);
  }
}

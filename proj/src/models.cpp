// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "fermicert/cond_exp.hpp"
#include "fermicert/dynamics.hpp"
#include "fermicert/error.hpp"

namespace fermicert {

namespace {

FockOperator bond_hopping(const SiteSetPtr& lambda, std::size_t x, std::size_t y) {
  const FockOperator ax = build_annihilator(lambda, x);
  const FockOperator ay = build_annihilator(lambda, y);
  const FockOperator forward = ax.adjoint() * ay;
  return forward + forward.adjoint();
}

void require_length(std::size_t length) {
  if (length < 2) throw Error(ErrorCode::domain, "chain length must be at least 2");
  if (length > kMaxSites) throw Error(ErrorCode::size_limit, "chain too long");
}

}  // namespace

Interaction hopping_chain(std::size_t length, double j, double mu, Boundary boundary) {
  require_length(length);
  if (boundary == Boundary::periodic && length < 3) {
    throw Error(ErrorCode::domain, "periodic hopping chain needs at least 3 sites");
  }
  const auto lambda = SiteSet::chain(length);
  Interaction phi(lambda);
  const std::size_t bonds = boundary == Boundary::periodic ? length : length - 1;
  for (std::size_t x = 0; x < bonds; ++x) {
    const std::size_t y = (x + 1) % length;
    const SiteMask z = site_bit(x) | site_bit(y);
    phi.add_term(z, bond_hopping(lambda, x, y).scaled(j), TimeProfile::constant(1.0),
                 "hop " + std::to_string(x) + "-" + std::to_string(y));
  }
  if (mu != 0.0) {
    for (std::size_t x = 0; x < length; ++x) {
      phi.add_term(site_bit(x), number_operator(lambda, site_bit(x)).scaled(mu),
                   TimeProfile::constant(1.0), "mu " + std::to_string(x));
    }
  }
  return phi;
}

Interaction ramped_hopping_chain(std::size_t length, double j0, double j1, double t0, double t1,
                                 double mu) {
  require_length(length);
  const auto lambda = SiteSet::chain(length);
  Interaction phi(lambda);
  for (std::size_t x = 0; x + 1 < length; ++x) {
    const SiteMask z = site_bit(x) | site_bit(x + 1);
    phi.add_term(z, bond_hopping(lambda, x, x + 1), TimeProfile::linear_ramp(t0, t1, j0, j1),
                 "hop " + std::to_string(x) + "-" + std::to_string(x + 1));
  }
  if (mu != 0.0) {
    for (std::size_t x = 0; x < length; ++x) {
      phi.add_term(site_bit(x), number_operator(lambda, site_bit(x)).scaled(mu),
                   TimeProfile::constant(1.0), "mu " + std::to_string(x));
    }
  }
  return phi;
}

double KitaevParams::resolved_mu() const {
  if (!std::isnan(mu)) return mu;
  if (std::abs(pairing) > std::abs(hopping)) {
    throw Error(ErrorCode::domain, "frustration-free point needs |pairing| <= |hopping|");
  }
  return 2.0 * std::sqrt(hopping * hopping - pairing * pairing);
}

Interaction kitaev_chain(std::size_t length, const KitaevParams& params) {
  require_length(length);
  if (!params.bond_weights.empty() && params.bond_weights.size() != length - 1) {
    throw Error(ErrorCode::dimension_mismatch, "kitaev chain needs one weight per bond");
  }
  const double mu = params.resolved_mu();
  const auto lambda = SiteSet::chain(length);
  Interaction phi(lambda);
  for (std::size_t x = 0; x + 1 < length; ++x) {
    const SiteMask z = site_bit(x) | site_bit(x + 1);
    const FockOperator ax = build_annihilator(lambda, x);
    const FockOperator ay = build_annihilator(lambda, x + 1);
    const FockOperator pair = ax * ay;
    FockOperator term = bond_hopping(lambda, x, x + 1).scaled(-params.hopping) +
                        (pair + pair.adjoint()).scaled(params.pairing) -
                        number_operator(lambda, z).scaled(0.5 * mu);
    const double shift = spectrum(term)[0];
    term = term - FockOperator::identity(lambda).widened(z).scaled(shift);
    const double w = params.bond_weights.empty() ? 1.0 : params.bond_weights[x];
    phi.add_term(z, term.scaled(w), TimeProfile::constant(1.0),
                 "bond " + std::to_string(x) + "-" + std::to_string(x + 1));
  }
  return phi;
}

Interaction number_chain(std::size_t length) {
  if (length < 1 || length > kMaxSites) throw Error(ErrorCode::domain, "invalid chain length");
  const auto lambda = SiteSet::chain(length);
  Interaction phi(lambda);
  for (std::size_t x = 0; x < length; ++x) {
    phi.add_term(site_bit(x), number_operator(lambda, site_bit(x)), TimeProfile::constant(1.0),
                 "n " + std::to_string(x));
  }
  return phi;
}

SiteMask OrbitalSet::ball(std::size_t center) const {
  SiteMask m = 0;
  for (std::size_t x = 0; x < graph.size(); ++x) {
    if (graph.distance(center, x) <= radius) m |= site_bit(x);
  }
  return m;
}

void OrbitalSet::validate(double tol) const {
  const std::size_t n = graph.size();
  if (valence.size() != valence_centers.size() || conduction.size() != conduction_centers.size()) {
    throw Error(ErrorCode::precondition, "each orbital needs a center");
  }
  std::vector<const Vector*> all;
  std::vector<std::size_t> centers;
  for (std::size_t k = 0; k < valence.size(); ++k) {
    all.push_back(&valence[k]);
    centers.push_back(valence_centers[k]);
  }
  for (std::size_t k = 0; k < conduction.size(); ++k) {
    all.push_back(&conduction[k]);
    centers.push_back(conduction_centers[k]);
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (static_cast<std::size_t>(all[i]->size()) != n) {
      throw Error(ErrorCode::dimension_mismatch, "orbital length differs from |Lambda|");
    }
    if (centers[i] >= n) throw Error(ErrorCode::site_not_in_lattice, "orbital center outside Lambda");
    if (std::abs(all[i]->norm() - 1.0) > tol) {
      throw Error(ErrorCode::precondition, "orbital " + std::to_string(i) + " is not normalized");
    }
    const SiteMask ball_mask = ball(centers[i]);
    for (std::size_t x = 0; x < n; ++x) {
      if (!(ball_mask & site_bit(x)) && std::abs((*all[i])[static_cast<Eigen::Index>(x)]) > tol) {
        throw Error(ErrorCode::precondition,
                    "orbital " + std::to_string(i) + " leaves its ball of radius R");
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(all[j]->dot(*all[i])) > tol) {
        throw Error(ErrorCode::precondition, "orbitals " + std::to_string(j) + " and " +
                                                 std::to_string(i) + " are not orthogonal");
      }
    }
  }
  if (all.size() != n) {
    throw Error(ErrorCode::precondition, "orbitals do not span the one-particle space");
  }
}

OrbitalSet brick_wall_orbitals(std::size_t length, double theta, double phi) {
  require_length(length);
  const auto n = static_cast<Eigen::Index>(length);
  const auto layer = [n](Eigen::Index first, double angle) {
    Matrix r = Matrix::Identity(n, n);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    for (Eigen::Index i = first; i + 1 < n; i += 2) {
      r(i, i) = c;
      r(i, i + 1) = -s;
      r(i + 1, i) = s;
      r(i + 1, i + 1) = c;
    }
    return r;
  };
  const Matrix u = layer(1, phi) * layer(0, theta);
  OrbitalSet set;
  set.graph = MetricGraph::chain(length);
  set.radius = 2.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector col = u.col(j);
    for (Eigen::Index x = 0; x < n; ++x) {
      if (std::abs(col[x]) < 1e-15) col[x] = 0.0;
    }
    if (j % 2 == 0) {
      set.valence.push_back(col);
      set.valence_centers.push_back(static_cast<std::size_t>(j));
    } else {
      set.conduction.push_back(col);
      set.conduction_centers.push_back(static_cast<std::size_t>(j));
    }
  }
  set.validate();
  return set;
}

namespace {

FockOperator dressed_mode(const SiteSetPtr& lambda, const Vector& f, SiteMask support) {
  const auto dim = static_cast<Eigen::Index>(lambda->dimension());
  Matrix m = Matrix::Zero(dim, dim);
  for (std::size_t x = 0; x < lambda->size(); ++x) {
    const cplx w = std::conj(f[static_cast<Eigen::Index>(x)]);
    if (w == cplx(0.0)) continue;
    m += w * build_annihilator(lambda, x).matrix();
  }
  return FockOperator(lambda, support, std::move(m), Parity::odd);
}

}  // namespace

BandModes band_operators(const OrbitalSet& orbitals) {
  orbitals.validate();
  const auto& lambda = orbitals.graph.sites();
  BandModes modes;
  for (std::size_t k = 0; k < orbitals.valence.size(); ++k) {
    modes.valence.push_back(
        dressed_mode(lambda, orbitals.valence[k], orbitals.ball(orbitals.valence_centers[k])));
  }
  for (std::size_t k = 0; k < orbitals.conduction.size(); ++k) {
    modes.conduction.push_back(dressed_mode(lambda, orbitals.conduction[k],
                                            orbitals.ball(orbitals.conduction_centers[k])));
  }
  return modes;
}

Interaction flat_band_model(const OrbitalSet& orbitals, double valence_weight,
                            double conduction_weight) {
  const BandModes modes = band_operators(orbitals);
  const auto& lambda = orbitals.graph.sites();
  Interaction phi(lambda);
  const FockOperator one = FockOperator::identity(lambda);
  // Terms are added in order of their centers so the left-to-right sequence
  // adds one ball per step.
  std::map<std::size_t, std::pair<bool, std::size_t>> by_center;
  for (std::size_t k = 0; k < modes.valence.size(); ++k) {
    by_center[orbitals.valence_centers[k]] = {true, k};
  }
  for (std::size_t k = 0; k < modes.conduction.size(); ++k) {
    by_center[orbitals.conduction_centers[k]] = {false, k};
  }
  for (const auto& [center, entry] : by_center) {
    const SiteMask ball = orbitals.ball(center);
    if (entry.first) {
      const FockOperator& b = modes.valence[entry.second];
      const FockOperator term = one.widened(ball) - b.adjoint() * b;
      phi.add_term(ball, FockOperator(lambda, ball, term.matrix() * valence_weight, Parity::even),
                   TimeProfile::constant(1.0), "valence " + std::to_string(center));
    } else {
      const FockOperator& c = modes.conduction[entry.second];
      phi.add_term(ball,
                   FockOperator(lambda, ball, (c.adjoint() * c).matrix() * conduction_weight,
                                Parity::even),
                   TimeProfile::constant(1.0), "conduction " + std::to_string(center));
    }
  }
  return phi;
}

Interaction rotated_flat_band(std::size_t length, double s) {
  return flat_band_model(brick_wall_orbitals(length, 0.3 + 0.8 * s, 0.2 + 0.6 * s));
}

Interaction closing_flat_band(std::size_t length, double s) {
  return flat_band_model(brick_wall_orbitals(length, 0.3, 0.2), 1.0, 1.0 - 2.0 * s);
}

HamiltonianSequence left_to_right_sequence(const Interaction& phi, double tol) {
  if (!phi.is_time_independent()) {
    throw Error(ErrorCode::precondition, "sequences are built from time-independent interactions");
  }
  auto supports = phi.supports();
  const auto lowest = [](SiteMask m) { return std::countr_zero(m); };
  const auto highest = [](SiteMask m) { return 63 - std::countl_zero(m); };
  std::stable_sort(supports.begin(), supports.end(), [&](SiteMask a, SiteMask b) {
    if (lowest(a) != lowest(b)) return lowest(a) < lowest(b);
    return highest(a) < highest(b);
  });
  const double t = std::isfinite(phi.t_min()) ? phi.t_min() : 0.0;
  std::vector<FockOperator> increments;
  for (SiteMask z : supports) increments.push_back(phi.value(z, t));
  return HamiltonianSequence::from_increments(std::move(increments), tol);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

FockOperator random_local_operator(const SiteSetPtr& lambda, SiteMask region, Parity parity,
                                   std::mt19937_64& rng) {
  lambda->check_mask(region);
  const auto indices = KraussIndex::enumerate(*lambda, region);
  const auto dim = static_cast<Eigen::Index>(lambda->dimension());
  Matrix m = Matrix::Zero(dim, dim);
  double weight = 0.0;
  for (const auto& alpha : indices) {
    const cplx c(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
    if (parity == Parity::even && alpha.parity() < 0) continue;
    if (parity == Parity::odd && alpha.parity() > 0) continue;
    const SignedPermutation u = unitary_string(*lambda, alpha.sites, alpha.labels);
    for (std::size_t s = 0; s < u.target.size(); ++s) {
      m(u.target[s], static_cast<Eigen::Index>(s)) += c * u.sign[s];
    }
    weight += std::norm(c);
  }
  if (weight > 0.0) m /= std::sqrt(weight);
  return FockOperator(lambda, region, std::move(m), parity);
}

Interaction random_even_interaction(const SiteSetPtr& lambda, std::size_t range, double strength,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Interaction phi(lambda);
  const std::size_t n = lambda->size();
  for (std::size_t width = 1; width <= std::min(range + 1, n); ++width) {
    for (std::size_t start = 0; start + width <= n; ++start) {
      SiteMask z = 0;
      for (std::size_t k = start; k < start + width; ++k) z |= site_bit(k);
      const FockOperator a = random_local_operator(lambda, z, Parity::even, rng);
      Matrix h = 0.5 * (a.matrix() + a.matrix().adjoint());
      const double norm = spectral_norm(h);
      if (norm > 0.0) h *= strength * (0.5 + 0.5 * uniform01(rng)) / norm;
      phi.add_term(z, FockOperator(lambda, z, std::move(h), Parity::even),
                   TimeProfile::constant(1.0), "random " + lambda->describe(z));
    }
  }
  return phi;
}

}  // namespace fermicert

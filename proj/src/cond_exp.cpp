// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/cond_exp.hpp"

#include <algorithm>
#include <cmath>

#include "fermicert/error.hpp"
#include "fermicert/models.hpp"
#include "fermicert/parallel.hpp"

namespace fermicert {

cplx tracial_state(const FockOperator& a) {
  return a.matrix().trace() / static_cast<double>(a.dimension());
}

int KraussIndex::parity() const {
  int p = 1;
  for (auto l : labels) {
    if (l == 1 || l == 2) p = -p;
  }
  return p;
}

std::vector<KraussIndex> KraussIndex::enumerate(const SiteSet& lambda, SiteMask complement) {
  const auto sites = lambda.indices(complement);
  if (sites.size() > kMaxKraussSites) {
    throw Error(ErrorCode::size_limit, "Krauss enumeration limited to " +
                                           std::to_string(kMaxKraussSites) + " sites");
  }
  const std::size_t count = std::size_t{1} << (2 * sites.size());
  std::vector<KraussIndex> out(count);
  for (std::size_t code = 0; code < count; ++code) {
    out[code].sites = sites;
    out[code].labels.resize(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
      out[code].labels[i] = static_cast<std::uint8_t>((code >> (2 * i)) & 3U);
    }
  }
  return out;
}

std::array<FockOperator, 4> krauss_unitaries(const SiteSetPtr& lambda, std::size_t index) {
  const FockOperator a = build_annihilator(lambda, index);
  const FockOperator c = a.adjoint();
  const FockOperator one = FockOperator::identity(lambda);
  return {one.widened(site_bit(index)), c + a, c - a, one - (c * a).scaled(2.0)};
}

namespace {

void check_region(const FockOperator& a, SiteMask region) {
  if (!is_subset(region, a.ambient()->all())) {
    throw Error(ErrorCode::domain, "X must be a subset of Lambda");
  }
}

Matrix single_site_average(const SiteSet& lambda, const Matrix& m, std::size_t x) {
  Matrix acc = m;
  for (int k = 1; k < 4; ++k) acc += single_site_unitary(lambda, x, k).conjugate(m);
  return 0.25 * acc;
}

// Output of E_X on an even input is even and supported in X; otherwise it
// lies in A_X^+ + A_X^- theta_Lambda and its parity is inferred.
FockOperator wrap_output(const FockOperator& a, SiteMask region, Matrix m) {
  if (a.parity() == Parity::even) {
    return FockOperator(a.ambient(), a.support() & region, std::move(m), Parity::even);
  }
  return FockOperator::from_matrix(a.ambient(), region, std::move(m));
}

}  // namespace

FockOperator cond_exp_E(const FockOperator& a, SiteMask region) {
  check_region(a, region);
  const auto order = a.ambient()->indices(a.ambient()->all() & ~region);
  return cond_exp_E(a, region, order);
}

FockOperator cond_exp_E(const FockOperator& a, SiteMask region,
                        std::span<const std::size_t> sweep_order) {
  check_region(a, region);
  const SiteSet& lambda = *a.ambient();
  SiteMask covered = 0;
  for (auto x : sweep_order) {
    if (x >= lambda.size() || (region & site_bit(x)) || (covered & site_bit(x))) {
      throw Error(ErrorCode::domain, "sweep order must list each site of Lambda\\X once");
    }
    covered |= site_bit(x);
  }
  if (covered != (lambda.all() & ~region)) {
    throw Error(ErrorCode::domain, "sweep order must cover Lambda\\X");
  }
  Matrix m = a.matrix();
  for (auto x : sweep_order) m = single_site_average(lambda, m, x);
  return wrap_output(a, region, std::move(m));
}

namespace {

FockOperator krauss_average(const FockOperator& a, SiteMask region, bool twisted) {
  check_region(a, region);
  const SiteSet& lambda = *a.ambient();
  const SiteMask complement = lambda.all() & ~region;
  if (static_cast<std::size_t>(popcount(complement)) > kMaxKraussSites) {
    throw Error(ErrorCode::size_limit, "Krauss sums are evaluated by brute force; |Lambda\\X| > " +
                                           std::to_string(kMaxKraussSites) + " refused");
  }
  const auto indices = KraussIndex::enumerate(lambda, complement);
  const auto dim = static_cast<Eigen::Index>(lambda.dimension());
  SignedPermutation theta = SignedPermutation::identity(lambda.dimension());
  for (std::size_t s = 0; s < lambda.dimension(); ++s) {
    theta.sign[s] = (popcount(static_cast<SiteMask>(s) & region) & 1) ? -1.0 : 1.0;
  }
  // Fixed chunking keeps the summation order independent of thread count.
  constexpr std::size_t kChunks = 16;
  std::vector<Matrix> partial(kChunks, Matrix::Zero(dim, dim));
  parallel_for(kChunks, [&](std::size_t chunk) {
    for (std::size_t i = chunk; i < indices.size(); i += kChunks) {
      SignedPermutation u = unitary_string(lambda, indices[i].sites, indices[i].labels);
      if (twisted && indices[i].parity() < 0) u = theta.then_left_of(u);
      partial[chunk] += u.conjugate(a.matrix());
    }
  });
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& p : partial) sum += p;
  sum /= static_cast<double>(indices.size());
  return wrap_output(a, region, std::move(sum));
}

}  // namespace

FockOperator cond_exp_E_krauss_sum(const FockOperator& a, SiteMask region) {
  return krauss_average(a, region, false);
}

FockOperator cond_exp_F(const FockOperator& a, SiteMask region) {
  return krauss_average(a, region, true);
}

LocalApproximation local_approximation(const FockOperator& a, SiteMask region) {
  check_region(a, region);
  if (a.parity() != Parity::even) {
    throw Error(ErrorCode::precondition, "local approximation requires an even observable");
  }
  const SiteSet& lambda = *a.ambient();
  const SiteMask complement = lambda.all() & ~region;
  FockOperator approx = cond_exp_E(a, region);
  const double error = spectral_norm(a.matrix() - approx.matrix());
  const auto bracket_norm = [&](const SignedPermutation& u) {
    const Matrix dense = u.dense();
    return spectral_norm(multiply(a.matrix(), dense) - multiply(dense, a.matrix()));
  };
  double bound = 0.0;
  bool exact = false;
  if (static_cast<std::size_t>(popcount(complement)) <= kExhaustiveKraussSites) {
    const auto indices = KraussIndex::enumerate(lambda, complement);
    std::vector<double> norms(indices.size());
    parallel_for(indices.size(), [&](std::size_t i) {
      norms[i] = bracket_norm(unitary_string(lambda, indices[i].sites, indices[i].labels));
    });
    for (double v : norms) bound = std::max(bound, v);
    exact = true;
  } else {
    for (auto x : lambda.indices(complement)) {
      double site_max = 0.0;
      for (int k = 1; k < 4; ++k) {
        site_max = std::max(site_max, bracket_norm(single_site_unitary(lambda, x, k)));
      }
      bound += site_max;
    }
  }
  return {std::move(approx), error, bound, exact};
}

CondExpReport cond_exp_report(const FockOperator& a, SiteMask region, std::string input) {
  CondExpReport report{std::move(input), region, cond_exp_E(a, region), "site-sweep", 0.0, 0.0};
  const FockOperator twice = cond_exp_E(report.output, region);
  report.projection_defect = spectral_norm(twice.matrix() - report.output.matrix());
  const auto [plus, minus] = parity_decompose(report.output);
  const FockOperator theta = parity_operator(a.ambient(), a.ambient()->all());
  report.range_defect =
      std::max(locality_defect(plus.widened(region), region),
               locality_defect(FockOperator(a.ambient(), region,
                                            multiply(minus.matrix(), theta.matrix()), Parity::odd),
                               region));
  return report;
}

namespace {

// Re-labels a region of `from` onto the sites of `to`.
SiteMask translate_mask(const SiteSet& from, const SiteSet& to, SiteMask mask) {
  SiteMask out = 0;
  for (auto i : from.indices(mask)) out |= site_bit(to.index_of(from.site(i)));
  return out;
}

}  // namespace

FamilyDefects verify_expectation_family(const SiteSetPtr& lambda, SiteMask x, SiteMask y,
                                        int samples, std::mt19937_64& rng) {
  lambda->check_mask(x);
  lambda->check_mask(y);
  FamilyDefects d;
  d.samples = samples;
  const SiteMask all = lambda->all();
  const SiteMask z = all & ~y;

  // Volume independence: Lambda_1 = X u Y listed in reverse order so the
  // Jordan-Wigner strings of the two representations differ.
  std::vector<Site> sub_sites;
  for (auto i : lambda->indices(x | y)) sub_sites.push_back(lambda->site(i));
  std::reverse(sub_sites.begin(), sub_sites.end());
  const auto sub = std::make_shared<const SiteSet>(std::move(sub_sites));
  const SiteMask x_sub = translate_mask(*lambda, *sub, x);

  for (int k = 0; k < samples; ++k) {
    const FockOperator general = random_local_operator(lambda, all, Parity::mixed, rng);
    const FockOperator lhs = cond_exp_E(cond_exp_E(general, y), x);
    const FockOperator rhs = cond_exp_E(general, x & y);
    d.composition = std::max(d.composition, spectral_norm(lhs.matrix() - rhs.matrix()));

    const FockOperator in_z = random_local_operator(lambda, z, Parity::even, rng);
    const FockOperator in_y = random_local_operator(lambda, y, Parity::even, rng);
    const FockOperator product = cond_exp_E(in_z * in_y, x);
    const FockOperator split_a = cond_exp_E(in_z, x | y) * cond_exp_E(in_y, x | (all & ~y));
    const FockOperator split_b = cond_exp_E(in_z, x | (all & ~z)) * cond_exp_E(in_y, x | z);
    d.product = std::max({d.product, spectral_norm(product.matrix() - split_a.matrix()),
                          spectral_norm(product.matrix() - split_b.matrix())});

    const FockOperator small = random_local_operator(sub, sub->all(), Parity::even, rng);
    const FockOperator small_result = embed(cond_exp_E(small, x_sub), lambda);
    const FockOperator large_result = cond_exp_E(embed(small, lambda), x);
    d.volume = std::max(d.volume, spectral_norm(small_result.matrix() - large_result.matrix()));
  }
  return d;
}

}  // namespace fermicert

// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fermicert/dynamics.hpp"
#include "fermicert/error.hpp"
#include "fermicert/parallel.hpp"

namespace fermicert {

namespace {

constexpr double kHermitianTolerance = 1e-12;

Matrix symmetrized(const FockOperator& h) {
  const Matrix& m = h.matrix();
  const double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  if (hermiticity_defect(m) > kHermitianTolerance * scale) {
    throw Error(ErrorCode::not_hermitian, "operator is not self-adjoint");
  }
  return 0.5 * (m + m.adjoint());
}

double max_abs_eigenvalue(const RealVector& ev) {
  if (ev.size() == 0) return 0.0;
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

double resolve_tolerance(const RealVector& ev, double tol) {
  return tol < 0.0 ? default_kernel_tolerance(ev) : tol;
}

std::size_t kernel_count(const RealVector& ev, double tol) {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double v = ev[i];
    if (v < -tol) {
      throw Error(ErrorCode::precondition,
                  "operator has eigenvalue " + std::to_string(v) + " below -tol");
    }
    if (v > tol / 10.0 && v < 10.0 * tol) {
      throw Error(ErrorCode::ambiguous_kernel,
                  "eigenvalue " + std::to_string(v) + " is within a factor 10 of the kernel tolerance");
    }
    if (v <= tol) ++count;
  }
  return count;
}

Matrix lowest_projection(const HermitianEigen& eig, std::size_t count) {
  const auto k = static_cast<Eigen::Index>(count);
  const Matrix v = eig.vectors.leftCols(k);
  return v * v.adjoint();
}

FockOperator projection_operator(const FockOperator& like, Matrix p) {
  return FockOperator(like.ambient(), like.ambient()->all(), std::move(p), Parity::even);
}

// Frobenius norm bounds the spectral norm from above; only matrices that
// fail the cheap test pay for an eigenvalue computation.
double small_norm(const Matrix& m, double tol) {
  const double frob = m.norm();
  return frob <= tol ? frob : spectral_norm(m);
}

}  // namespace

RealVector spectrum(const FockOperator& h) { return hermitian_eigenvalues(symmetrized(h)); }

double default_kernel_tolerance(const RealVector& eigenvalues) {
  return 1e-8 * std::max(1.0, max_abs_eigenvalue(eigenvalues));
}

FrustrationFreeResult frustration_free_check(const Interaction& phi) {
  if (!phi.is_time_independent() || !phi.is_even()) {
    throw Error(ErrorCode::precondition,
                "frustration-freeness is checked for time-independent even interactions");
  }
  const double t = std::isfinite(phi.t_min()) ? phi.t_min() : 0.0;
  const auto supports = phi.supports();
  std::vector<Matrix> terms(supports.size());
  std::vector<double> minima(supports.size());
  parallel_for(supports.size(), [&](std::size_t i) {
    terms[i] = symmetrized(phi.value(supports[i], t));
    minima[i] = hermitian_eigenvalues(terms[i])[0];
  });
  FrustrationFreeResult r;
  for (double m : minima) r.termwise_sum += m;
  const HermitianEigen eig = hermitian_eigen(symmetrized(local_hamiltonian(phi, t)));
  r.ground_energy = eig.values[0];
  r.residual = r.ground_energy - r.termwise_sum;
  const double tol = default_kernel_tolerance(eig.values);
  while (r.ground_degeneracy < static_cast<std::size_t>(eig.values.size()) &&
         eig.values[static_cast<Eigen::Index>(r.ground_degeneracy)] <= r.ground_energy + tol) {
    ++r.ground_degeneracy;
  }
  const Matrix ground = eig.vectors.leftCols(static_cast<Eigen::Index>(r.ground_degeneracy));
  for (std::size_t i = 0; i < supports.size(); ++i) {
    const Matrix shifted =
        terms[i] - minima[i] * Matrix::Identity(terms[i].rows(), terms[i].cols());
    const Matrix image = shifted * ground;
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      r.annihilation_residual = std::max(r.annihilation_residual, image.col(c).norm());
    }
  }
  r.frustration_free = std::abs(r.residual) <= kFrustrationTolerance &&
                       r.annihilation_residual <= kFrustrationTolerance;
  return r;
}

FockOperator kernel_projection(const FockOperator& h, double tol) {
  const HermitianEigen eig = hermitian_eigen(symmetrized(h));
  tol = resolve_tolerance(eig.values, tol);
  return projection_operator(h, lowest_projection(eig, kernel_count(eig.values, tol)));
}

std::size_t projection_rank(const FockOperator& p) {
  return static_cast<std::size_t>(std::llround(p.matrix().trace().real()));
}

std::vector<FockOperator> resolution_family(const std::vector<FockOperator>& kernels) {
  if (kernels.empty()) {
    throw Error(ErrorCode::precondition, "resolution family needs at least one kernel projection");
  }
  for (std::size_t n = 0; n + 1 < kernels.size(); ++n) {
    const Matrix& next = kernels[n + 1].matrix();
    const double defect = small_norm(next - multiply(next, kernels[n].matrix()), kNestingTolerance);
    if (defect > kNestingTolerance) {
      throw Error(ErrorCode::nesting, "kernel projections are not nested at n = " +
                                          std::to_string(n + 2) + " (defect " +
                                          std::to_string(defect) + ")");
    }
  }
  const auto& like = kernels.front();
  const auto dim = static_cast<Eigen::Index>(like.dimension());
  std::vector<FockOperator> e;
  e.reserve(kernels.size() + 1);
  e.push_back(projection_operator(like, Matrix::Identity(dim, dim) - kernels.front().matrix()));
  for (std::size_t n = 0; n + 1 < kernels.size(); ++n) {
    e.push_back(projection_operator(like, kernels[n].matrix() - kernels[n + 1].matrix()));
  }
  e.push_back(kernels.back());
  return e;
}

ResolutionDefects resolution_defects(const std::vector<FockOperator>& family) {
  ResolutionDefects d;
  if (family.empty()) return d;
  const auto dim = static_cast<Eigen::Index>(family.front().dimension());
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t n = 0; n < family.size(); ++n) {
    const Matrix& en = family[n].matrix();
    sum += en;
    d.self_adjoint = std::max(d.self_adjoint, small_norm(en - en.adjoint(), kNestingTolerance));
    for (std::size_t m = n; m < family.size(); ++m) {
      Matrix prod = multiply(en, family[m].matrix());
      if (m == n) prod -= en;
      d.orthogonality = std::max(d.orthogonality, small_norm(prod, kNestingTolerance));
    }
  }
  d.completeness = small_norm(sum - Matrix::Identity(dim, dim), kNestingTolerance);
  return d;
}

HamiltonianSequence HamiltonianSequence::from_increments(std::vector<FockOperator> increments,
                                                         double tol) {
  HamiltonianSequence seq;
  seq.tol_ = tol;
  seq.increments_ = std::move(increments);
  for (std::size_t n = 0; n < seq.increments_.size(); ++n) {
    seq.partial_sums_.push_back(n == 0 ? seq.increments_[0]
                                       : seq.partial_sums_.back() + seq.increments_[n]);
  }
  seq.validate();
  return seq;
}

HamiltonianSequence HamiltonianSequence::from_partial_sums(std::vector<FockOperator> partial_sums,
                                                           double tol) {
  HamiltonianSequence seq;
  seq.tol_ = tol;
  seq.partial_sums_ = std::move(partial_sums);
  for (std::size_t n = 0; n < seq.partial_sums_.size(); ++n) {
    seq.increments_.push_back(n == 0 ? seq.partial_sums_[0]
                                     : seq.partial_sums_[n] - seq.partial_sums_[n - 1]);
  }
  seq.validate();
  return seq;
}

void HamiltonianSequence::validate() {
  if (increments_.empty()) {
    throw Error(ErrorCode::precondition, "Hamiltonian sequence is empty");
  }
  const auto& ambient = *increments_.front().ambient();
  for (const auto& h : increments_) {
    if (!(*h.ambient() == ambient)) {
      throw Error(ErrorCode::dimension_mismatch, "sequence operators live on different site sets");
    }
    if (h.parity() != Parity::even) {
      throw Error(ErrorCode::parity, "sequence operators must be even");
    }
  }
  std::vector<double> minima(increments_.size());
  std::vector<double> tols(increments_.size());
  parallel_for(increments_.size(), [&](std::size_t n) {
    const RealVector ev = spectrum(increments_[n]);
    minima[n] = ev[0];
    tols[n] = resolve_tolerance(ev, tol_);
  });
  for (std::size_t n = 0; n < minima.size(); ++n) {
    monotonicity_defect_ = std::min(monotonicity_defect_, minima[n]);
    if (minima[n] < -tols[n]) {
      throw Error(ErrorCode::precondition, "increment h_" + std::to_string(n + 1) +
                                               " has negative eigenvalue " +
                                               std::to_string(minima[n]));
    }
  }
}

std::optional<double> spectral_gap(const RealVector& ev, double tol) {
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (ev[i] > ev[0] + tol) return ev[i] - ev[0];
  }
  return std::nullopt;
}

GapCertificate martingale_certificate(const HamiltonianSequence& seq, bool compute_exact) {
  const std::size_t big_n = seq.length();
  const auto& h = seq.increments();
  const auto& big_h = seq.partial_sums();
  std::vector<HermitianEigen> eig_h(big_n);
  std::vector<HermitianEigen> eig_big(big_n);
  parallel_for(2 * big_n, [&](std::size_t i) {
    if (i < big_n) {
      eig_h[i] = hermitian_eigen(symmetrized(h[i]));
    } else {
      eig_big[i - big_n] = hermitian_eigen(symmetrized(big_h[i - big_n]));
    }
  });

  GapCertificate cert;
  cert.steps.resize(big_n);
  std::vector<FockOperator> g;
  std::vector<FockOperator> big_g;
  cert.gamma = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < big_n; ++n) {
    const double tol_h = resolve_tolerance(eig_h[n].values, seq.tolerance());
    const std::size_t k_h = kernel_count(eig_h[n].values, tol_h);
    g.push_back(projection_operator(h[n], lowest_projection(eig_h[n], k_h)));
    const double tol_big = resolve_tolerance(eig_big[n].values, seq.tolerance());
    const std::size_t k_big = kernel_count(eig_big[n].values, tol_big);
    big_g.push_back(projection_operator(h[n], lowest_projection(eig_big[n], k_big)));
    auto& step = cert.steps[n];
    step.n = n + 1;
    step.kernel_rank = k_big;
    step.gamma = k_h < static_cast<std::size_t>(eig_h[n].values.size())
                     ? eig_h[n].values[static_cast<Eigen::Index>(k_h)]
                     : std::numeric_limits<double>::infinity();
    cert.gamma = std::min(cert.gamma, step.gamma);
  }

  const auto e = resolution_family(big_g);
  cert.resolution = resolution_defects(e);

  // Commutators [E_k, g_{n+1}] for n = 0..N-1, k = 0..N.
  std::vector<double> comm(big_n * (big_n + 1), 0.0);
  parallel_for(comm.size(), [&](std::size_t idx) {
    const std::size_t n = idx / (big_n + 1);
    const std::size_t k = idx % (big_n + 1);
    const Matrix& ek = e[k].matrix();
    const Matrix& gn = g[n].matrix();
    comm[idx] = small_norm(multiply(ek, gn) - multiply(gn, ek), kCommutationTolerance);
  });
  std::size_t ell = 0;
  bool ell_defined = true;
  for (std::size_t n = 0; n < big_n; ++n) {
    std::size_t reach = 0;
    for (std::size_t k = 0; k <= big_n; ++k) {
      if (comm[n * (big_n + 1) + k] <= kCommutationTolerance) continue;
      if (k > n) {
        ell_defined = false;
      } else {
        reach = std::max(reach, n - k);
      }
    }
    cert.steps[n].reach = reach;
    ell = std::max(ell, reach);
  }
  if (ell_defined) cert.ell = ell;
  for (std::size_t n = 0; n < big_n; ++n) {
    for (std::size_t k = 0; k <= big_n; ++k) {
      const bool inside = ell_defined && k <= n && n - k <= ell;
      if (!inside && k <= n) cert.defect_ii = std::max(cert.defect_ii, comm[n * (big_n + 1) + k]);
    }
  }

  // E_n g_{n+1} E_n for n = 0..N-1.
  std::vector<Matrix> sandwiches(big_n);
  std::vector<double> eps2(big_n);
  parallel_for(big_n, [&](std::size_t n) {
    const Matrix& en = e[n].matrix();
    Matrix s = multiply(multiply(en, g[n].matrix()), en);
    s = 0.5 * (s + s.adjoint());
    sandwiches[n] = std::move(s);
    const RealVector ev = hermitian_eigenvalues(sandwiches[n]);
    eps2[n] = std::max(0.0, ev[ev.size() - 1]);
  });
  double eps_squared = 0.0;
  for (std::size_t n = 0; n < big_n; ++n) {
    cert.steps[n].epsilon_squared = eps2[n];
    eps_squared = std::max(eps_squared, eps2[n]);
  }
  cert.epsilon = std::sqrt(eps_squared);

  std::vector<double> d1(big_n, 0.0);
  std::vector<double> d3(big_n, 0.0);
  const bool finite_gamma = std::isfinite(cert.gamma);
  parallel_for(big_n, [&](std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(h[n].dimension());
    if (finite_gamma) {
      const Matrix lhs = symmetrized(h[n]) -
                         cert.gamma * (Matrix::Identity(dim, dim) - g[n].matrix());
      d1[n] = std::max(0.0, -hermitian_eigenvalues(0.5 * (lhs + lhs.adjoint()))[0]);
    }
    const Matrix rest = sandwiches[n] - eps_squared * e[n].matrix();
    const RealVector ev = hermitian_eigenvalues(0.5 * (rest + rest.adjoint()));
    d3[n] = std::max(0.0, ev[ev.size() - 1]);
  });
  for (std::size_t n = 0; n < big_n; ++n) {
    cert.defect_i = std::max(cert.defect_i, d1[n]);
    cert.defect_iii = std::max(cert.defect_iii, d3[n]);
  }

  if (ell_defined && finite_gamma) {
    const double x = cert.epsilon * std::sqrt(1.0 + static_cast<double>(ell));
    if (x < 1.0) cert.bound = cert.gamma * (1.0 - x) * (1.0 - x);
  }
  const RealVector& top = eig_big.back().values;
  const double tol_top = resolve_tolerance(top, seq.tolerance());
  cert.ground_degeneracy = cert.steps.back().kernel_rank;
  if (compute_exact) cert.exact_gap = spectral_gap(top, tol_top);
  return cert;
}

SandwichResult sandwich_check(const FockOperator& target, const FockOperator& h_n) {
  if (target.dimension() != h_n.dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "sandwich operands differ in dimension");
  }
  const HermitianEigen te = hermitian_eigen(symmetrized(target));
  const HermitianEigen he = hermitian_eigen(symmetrized(h_n));
  SandwichResult r;
  r.ground_energy = te.values[0];
  const auto dim = static_cast<Eigen::Index>(target.dimension());
  const Matrix shifted =
      symmetrized(target) - r.ground_energy * Matrix::Identity(dim, dim);
  const double tol = default_kernel_tolerance(he.values);
  const auto k = static_cast<Eigen::Index>(kernel_count(he.values, tol));
  const double scale = std::max(1.0, max_abs_eigenvalue(te.values - RealVector::Constant(dim, r.ground_energy)));
  if (k > 0) {
    const Matrix image = shifted * he.vectors.leftCols(k);
    Eigen::Index worst = 0;
    double worst_norm = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (image.col(c).norm() > worst_norm) {
        worst_norm = image.col(c).norm();
        worst = c;
      }
    }
    if (worst_norm > 1e-10 * scale) {
      r.witness = he.vectors.col(worst);
      r.witness_residual = worst_norm;
      return r;
    }
  }
  const Eigen::Index rest = dim - k;
  if (rest == 0) {
    r.ok = true;
    return r;
  }
  const Matrix v = he.vectors.rightCols(rest);
  RealVector inv_sqrt(rest);
  for (Eigen::Index i = 0; i < rest; ++i) inv_sqrt[i] = 1.0 / std::sqrt(he.values[k + i]);
  Matrix m = v.adjoint() * shifted * v;
  m = inv_sqrt.asDiagonal() * m * inv_sqrt.asDiagonal();
  const RealVector ev = hermitian_eigenvalues(0.5 * (m + m.adjoint()));
  r.c = ev[0];
  r.big_c = ev[rest - 1];
  r.ok = true;
  return r;
}

namespace {

struct Snapshot {
  Matrix projection;
  double gap = 0.0;
};

double gap_above(const RealVector& ev, std::size_t rank) {
  const auto r = static_cast<Eigen::Index>(rank);
  if (r <= 0 || r >= ev.size()) return std::numeric_limits<double>::infinity();
  return ev[r] - ev[r - 1];
}

Snapshot snapshot(const HamiltonianFamily& family, double s, std::size_t rank) {
  const HermitianEigen eig = hermitian_eigen(symmetrized(family(s)));
  return {lowest_projection(eig, rank), gap_above(eig.values, rank)};
}

double locate_crossing(const HamiltonianFamily& family, double lo, double hi, double gamma_min,
                       std::size_t rank) {
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap_above(spectrum(family(mid)), rank);
    (g >= gamma_min ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Kato generator [P', P] with P' from a centred difference about the midpoint.
Matrix transport_step(const Matrix& p0, const Matrix& p_mid, const Matrix& p1, double h) {
  const Matrix dp = (p1 - p0) / h;
  const Matrix k = dp * p_mid - p_mid * dp;
  // k is anti-Hermitian; exp(h k) = exp(-i h (i k)).
  const Matrix ik = cplx(0.0, 1.0) * k;
  return expm_hermitian(0.5 * (ik + ik.adjoint()), cplx(0.0, -h));
}

constexpr double kMaxProjectionChange = 0.1;
constexpr int kMaxSubsteps = 4096;

}  // namespace

FlowReport projection_flow(const HamiltonianFamily& family, const std::vector<double>& grid,
                           double gamma_min, std::size_t rank, int substeps) {
  if (grid.empty()) throw Error(ErrorCode::domain, "flow grid is empty");
  if (substeps < 1) throw Error(ErrorCode::domain, "substeps must be positive");
  if (!(gamma_min > 0.0)) throw Error(ErrorCode::domain, "gamma_min must be positive");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::domain, "flow grid must increase");
  }
  if (rank == 0) {
    const RealVector ev = spectrum(family(grid.front()));
    const double tol = default_kernel_tolerance(ev);
    while (rank < static_cast<std::size_t>(ev.size()) &&
           ev[static_cast<Eigen::Index>(rank)] <= ev[0] + tol) {
      ++rank;
    }
  }

  std::vector<Snapshot> points(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { points[i] = snapshot(family, grid[i], rank); });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (points[i].gap < gamma_min) {
      const double location =
          i == 0 ? grid[0] : locate_crossing(family, grid[i - 1], grid[i], gamma_min, rank);
      throw GapClosure(location, points[i].gap, grid[i]);
    }
  }

  FlowReport report;
  report.substeps = substeps;
  const Matrix& p_start = points.front().projection;
  const auto dim = p_start.rows();
  Matrix u = Matrix::Identity(dim, dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) {
      int n = substeps;
      while (true) {
        const double h = (grid[i] - grid[i - 1]) / n;
        Matrix step_u = Matrix::Identity(dim, dim);
        Matrix prev = points[i - 1].projection;
        double change = 0.0;
        for (int k = 0; k < n; ++k) {
          const double a = grid[i - 1] + k * h;
          const Matrix next = k + 1 == n ? points[i].projection : snapshot(family, a + h, rank).projection;
          const Matrix mid = snapshot(family, a + 0.5 * h, rank).projection;
          change = std::max(change, spectral_norm(next - prev));
          if (change > kMaxProjectionChange) break;
          step_u = transport_step(prev, mid, next, h) * step_u;
          prev = next;
        }
        if (change <= kMaxProjectionChange) {
          report.max_step_change = std::max(report.max_step_change, change);
          u = step_u * u;
          break;
        }
        if (n >= kMaxSubsteps) {
          throw Error(ErrorCode::precondition, "projection changes too fast to transport");
        }
        n *= 2;
      }
      report.substeps = std::max(report.substeps, n);
    }
    FlowPoint fp;
    fp.s = grid[i];
    fp.gap = points[i].gap;
    fp.trace = points[i].projection.trace().real();
    fp.rank = static_cast<std::size_t>(std::llround(fp.trace));
    fp.defect = spectral_norm(points[i].projection - u * p_start * u.adjoint());
    report.max_defect = std::max(report.max_defect, fp.defect);
    if (fp.rank != rank || std::abs(fp.trace - static_cast<double>(rank)) > 1e-8) {
      report.rank_constant = false;
    }
    report.points.push_back(fp);
  }
  report.max_unitarity_defect =
      norm_upper_bound(u.adjoint() * u - Matrix::Identity(dim, dim));
  return report;
}

FlowReport projection_flow(const std::function<Interaction(double)>& family,
                           const std::vector<double>& grid, double gamma_min, std::size_t rank,
                           int substeps) {
  const HamiltonianFamily h = [&family](double s) {
    const Interaction phi = family(s);
    return local_hamiltonian(phi, std::isfinite(phi.t_min()) ? phi.t_min() : 0.0);
  };
  return projection_flow(h, grid, gamma_min, rank, substeps);
}

}  // namespace fermicert

// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/dynamics.hpp"

#include <cmath>
#include <optional>

#include "fermicert/error.hpp"

namespace fermicert {

FockOperator local_hamiltonian(const Interaction& phi, SiteMask region, double t) {
  if (!phi.contains_time(t)) {
    throw Error(ErrorCode::domain, "time " + std::to_string(t) + " lies outside the interaction interval");
  }
  const auto& lambda = phi.ambient();
  region &= lambda->all();
  const auto dim = static_cast<Eigen::Index>(lambda->dimension());
  Matrix h = Matrix::Zero(dim, dim);
  SiteMask support = 0;
  bool even = true;
  for (const auto& term : phi.terms()) {
    if (!is_subset(term.support, region)) continue;
    const double c = term.profile(t);
    if (c == 0.0) continue;
    h += c * term.op.matrix();
    support |= term.support;
    even = even && term.op.parity() == Parity::even;
  }
  if (even) return FockOperator(lambda, support, std::move(h), Parity::even);
  return FockOperator::from_matrix(lambda, support, std::move(h));
}

FockOperator local_hamiltonian(const Interaction& phi, double t) {
  return local_hamiltonian(phi, phi.ambient()->all(), t);
}

namespace {

double unitarity_defect(const Matrix& u) {
  const auto dim = u.rows();
  return norm_upper_bound(u.adjoint() * u - Matrix::Identity(dim, dim));
}

void check_window(const Interaction& phi, double s, double t, double step) {
  if (!phi.is_even()) {
    throw Error(ErrorCode::parity, "propagate accepts only even interactions");
  }
  if (!std::isfinite(s) || !std::isfinite(t)) {
    throw Error(ErrorCode::domain, "propagation window must be finite");
  }
  if (!phi.contains_time(s) || !phi.contains_time(t)) {
    throw Error(ErrorCode::domain, "propagation window lies outside the interaction interval");
  }
  if (!(step > 0.0)) throw Error(ErrorCode::domain, "step must be positive");
}

// Advances `p` from p.end to `t`.
class Stepper {
 public:
  Stepper(const Interaction& phi, double step, SiteMask region)
      : phi_(phi), step_(step), region_(region) {}

  void advance(Propagator& p, double t) {
    const double span = t - p.end;
    if (span == 0.0) return;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / step_ - 1e-9)));
    const double dt = span / n;
    const double t0 = p.end;
    for (int k = 0; k < n; ++k) {
      const double mid = t0 + (k + 0.5) * dt;
      p.unitary = step_unitary(mid, dt) * p.unitary;
      ++p.steps;
      if ((p.steps % 8) == 0 || k + 1 == n) {
        p.unitarity_defect = unitarity_defect(p.unitary);
        if (p.unitarity_defect > kUnitarityTolerance) {
          p.unitary = polar_unitary(p.unitary);
          ++p.reunitarizations;
          p.unitarity_defect = unitarity_defect(p.unitary);
        }
      }
    }
    p.step = std::abs(dt);
    p.end = t;
  }

 private:
  Matrix step_unitary(double mid, double dt) {
    const cplx factor(0.0, -dt);
    if (phi_.is_time_independent()) {
      if (!static_eig_) static_eig_ = hermitian_eigen(local_hamiltonian(phi_, region_, mid).matrix());
      if (!cached_dt_ || *cached_dt_ != dt) {
        cached_ = expm_hermitian(*static_eig_, factor);
        cached_dt_ = dt;
      }
      return cached_;
    }
    return expm_hermitian(local_hamiltonian(phi_, region_, mid).matrix(), factor);
  }

  const Interaction& phi_;
  double step_;
  SiteMask region_;
  std::optional<HermitianEigen> static_eig_;
  std::optional<double> cached_dt_;
  Matrix cached_;
};

Propagator start_at(const Interaction& phi, double s, double step) {
  const auto dim = static_cast<Eigen::Index>(phi.ambient()->dimension());
  Propagator p;
  p.ambient = phi.ambient();
  p.unitary = Matrix::Identity(dim, dim);
  p.start = s;
  p.end = s;
  p.step = step;
  return p;
}

}  // namespace

Propagator propagate(const Interaction& phi, double s, double t, double step, SiteMask region) {
  check_window(phi, s, t, step);
  Propagator p = start_at(phi, s, step);
  Stepper stepper(phi, step, region);
  stepper.advance(p, t);
  return p;
}

std::vector<Propagator> propagate_grid(const Interaction& phi, double s,
                                       std::span<const double> times, double step,
                                       SiteMask region) {
  std::vector<Propagator> out;
  out.reserve(times.size());
  Propagator p = start_at(phi, s, step);
  Stepper stepper(phi, step, region);
  double previous = s;
  for (double t : times) {
    check_window(phi, s, t, step);
    if (t < previous) throw Error(ErrorCode::domain, "propagation grid must be non-decreasing");
    stepper.advance(p, t);
    out.push_back(p);
    previous = t;
  }
  return out;
}

namespace {

void check_compatible(const FockOperator& a, const Propagator& u) {
  if (static_cast<Eigen::Index>(a.dimension()) != u.unitary.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "observable and propagator dimensions differ");
  }
}

}  // namespace

FockOperator heisenberg(const FockOperator& a, const Propagator& u) {
  check_compatible(a, u);
  Matrix m = u.unitary.adjoint() * multiply(a.matrix(), u.unitary);
  // The evolved operator is no longer localized; its support is the lattice.
  return FockOperator::projected(a.ambient(), a.ambient()->all(), std::move(m), a.parity());
}

FockOperator inverse_heisenberg(const FockOperator& a, const Propagator& u) {
  check_compatible(a, u);
  Matrix m = u.unitary * multiply(a.matrix(), Matrix(u.unitary.adjoint()));
  return FockOperator::projected(a.ambient(), a.ambient()->all(), std::move(m), a.parity());
}

}  // namespace fermicert

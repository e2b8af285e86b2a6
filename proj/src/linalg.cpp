// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/linalg.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "fermicert/error.hpp"

namespace fermicert {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::site_not_in_lattice: return "site-not-in-lattice";
    case ErrorCode::domain: return "domain";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::parity: return "parity";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::certification_failed: return "certification-failed";
    case ErrorCode::ambiguous_kernel: return "ambiguous-kernel";
    case ErrorCode::gap_closure: return "gap-closure";
    case ErrorCode::size_limit: return "size-limit";
    case ErrorCode::not_hermitian: return "not-hermitian";
    case ErrorCode::nesting: return "nesting";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

CertificationFailed::CertificationFailed(double t, double m, double b)
    : Error(ErrorCode::certification_failed,
            "Lieb-Robinson bound violated at t=" + std::to_string(t) +
                ": measured " + std::to_string(m) + " > bound " +
                std::to_string(b)),
      time(t),
      measured(m),
      bound(b) {}

GapClosure::GapClosure(double loc, double g, double grid)
    : Error(ErrorCode::gap_closure,
            "spectral gap closes near s=" + std::to_string(loc) +
                " (gap " + std::to_string(g) + " at grid point s=" +
                std::to_string(grid) + ")"),
      location(loc),
      gap(g),
      grid_point(grid) {}

HermitianEigen hermitian_eigen(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::domain, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector hermitian_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::domain, "Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues();
}

Matrix expm_hermitian(const HermitianEigen& eig, cplx factor) {
  Vector phases(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    phases[i] = std::exp(factor * eig.values[i]);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Matrix expm_hermitian(const Matrix& h, cplx factor) {
  return expm_hermitian(hermitian_eigen(h), factor);
}

Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  // Rescale so tiny matrices do not lose precision when squared.
  const Matrix s = m / scale;
  const Matrix gram = s.rows() <= s.cols() ? Matrix(multiply(s, s.adjoint()))
                                           : Matrix(multiply(s.adjoint(), s));
  const RealVector ev = hermitian_eigenvalues(gram);
  return scale * std::sqrt(std::max(0.0, ev[ev.size() - 1]));
}

double norm_upper_bound(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXd a = m.cwiseAbs();
  const double col = a.colwise().sum().maxCoeff();
  const double row = a.rowwise().sum().maxCoeff();
  return std::sqrt(col * row);
}

double hermiticity_defect(const Matrix& m) {
  return norm_upper_bound(m - m.adjoint());
}

namespace {

constexpr double kSparseFraction = 0.05;

bool mostly_zero(const Matrix& m, Eigen::Index& nnz) {
  nnz = 0;
  const Eigen::Index limit =
      static_cast<Eigen::Index>(kSparseFraction * static_cast<double>(m.size()));
  const cplx* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (data[i] != cplx(0.0, 0.0) && ++nnz > limit) return false;
  }
  return true;
}

Eigen::SparseMatrix<cplx> to_sparse(const Matrix& m, Eigen::Index nnz) {
  std::vector<Eigen::Triplet<cplx>> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m(r, c) != cplx(0.0, 0.0)) entries.emplace_back(r, c, m(r, c));
    }
  }
  Eigen::SparseMatrix<cplx> s(m.rows(), m.cols());
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

}  // namespace

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.rows() < 32) return a * b;
  Eigen::Index nnz_a = 0;
  Eigen::Index nnz_b = 0;
  if (mostly_zero(a, nnz_a)) {
    if (mostly_zero(b, nnz_b)) {
      return Matrix(to_sparse(a, nnz_a) * to_sparse(b, nnz_b));
    }
    return to_sparse(a, nnz_a) * b;
  }
  if (mostly_zero(b, nnz_b)) return a * to_sparse(b, nnz_b);
  return a * b;
}

}  // namespace fermicert

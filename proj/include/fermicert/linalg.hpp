// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace fermicert {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};

HermitianEigen hermitian_eigen(const Matrix& h);
RealVector hermitian_eigenvalues(const Matrix& h);

/// exp(factor * h) for Hermitian h via its spectral decomposition.
Matrix expm_hermitian(const Matrix& h, cplx factor);
Matrix expm_hermitian(const HermitianEigen& eig, cplx factor);

/// Unitary factor of the polar decomposition.
Matrix polar_unitary(const Matrix& m);

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// sqrt(|m|_1 |m|_inf), an upper bound on the spectral norm in O(d^2).
double norm_upper_bound(const Matrix& m);

double hermiticity_defect(const Matrix& m);

/// Matrix product that switches to a sparse kernel when either factor is
/// mostly zeros (Jordan-Wigner generators have one entry per column).
Matrix multiply(const Matrix& a, const Matrix& b);

}  // namespace fermicert

// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

// Metric structure, decay functions, and the constants that enter the
// Lieb-Robinson bound. All suprema are exact over the given finite graph and
// therefore lower-bound the corresponding infinite-volume constants.

#pragma once

#include <vector>

#include "fermicert/fock.hpp"
#include "fermicert/interaction.hpp"

namespace fermicert {

enum class Boundary { open, periodic };

class MetricGraph {
 public:
  /// Explicit distance matrix (row-major, |sites|^2 entries).
  MetricGraph(SiteSetPtr sites, std::vector<double> distances);

  static MetricGraph chain(std::size_t length, Boundary boundary = Boundary::open);
  /// Z^nu slab with l1 distance; sites are enumerated with the first
  /// coordinate varying fastest.
  static MetricGraph slab(const std::vector<int>& sides, Boundary boundary = Boundary::open);

  const SiteSetPtr& sites() const { return sites_; }
  std::size_t size() const { return sites_->size(); }
  double distance(std::size_t i, std::size_t j) const { return distances_[i * size() + j]; }

  /// Largest violation of symmetry, identity or the triangle inequality.
  double metric_defect() const;

 private:
  SiteSetPtr sites_;
  std::vector<double> distances_;
};

/// F_a(r) = exp(-a r) / (1 + r)^(nu + epsilon).
struct DecayFunction {
  double nu = 1.0;
  double epsilon = 1.0;
  double a = 0.0;

  double operator()(double r) const;
};

/// sup_x sum_y F(d(x, y)).
double f_norm(const DecayFunction& f, const MetricGraph& graph);
/// sup_{x,y} sum_z F(d(x, z)) F(d(z, y)) / F(d(x, y)).
double f_conv_constant(const DecayFunction& f, const MetricGraph& graph);

class GFunction {
 public:
  GFunction(Eigen::MatrixXd values);

  double operator()(std::size_t x, std::size_t y) const { return values_(x, y); }
  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  /// sup_x sum_z G(x, z).
  double norm() const { return norm_; }
  const Eigen::MatrixXd& values() const { return values_; }

  /// max_{x,y} sum_z G(x,z) G(z,y) / G(x,y); at most 1 for a valid G.
  double convolution_ratio() const;
  double symmetry_defect() const;

  /// G_g(x, y) = g(x) g(y) G(x, y) for g with values in (0, 1].
  GFunction weighted(const std::vector<double>& g) const;

 private:
  Eigen::MatrixXd values_;
  double norm_;
};

/// G(x, y) = F(d(x, y)) / C.
GFunction g_from_f(const DecayFunction& f, const MetricGraph& graph);

/// Uniform sampling grid over [s, t] with `intervals` subintervals.
std::vector<double> uniform_grid(double s, double t, int intervals);

/// Smallest k with sum_{Z contains x,y} ||Phi(Z,t)|| <= k G(x,y) for all
/// pairs (including x = y).
double interaction_g_norm(const Interaction& phi, const GFunction& g, double t);

/// int_s^t ||Phi||_G(r) dr: exact for time-independent interactions, composite
/// Simpson on `intervals` (rounded up to even) subintervals otherwise.
double interaction_g_norm_integral(const Interaction& phi, const GFunction& g, double s, double t,
                                   int intervals = 64);

/// Elements of S_Lambda(X) among the supports of phi that lie inside Lambda.
std::vector<SiteMask> surface_sets(SiteMask lambda, SiteMask region, const Interaction& phi);

/// Sites of X touched by a crossing term that is nonzero at some time of
/// the uniform grid over [s, t].
SiteMask phi_boundary(const Interaction& phi, SiteMask region, double s, double t,
                      int intervals = 64);
/// Time-independent form: grid collapses to t = 0.
SiteMask phi_boundary(const Interaction& phi, SiteMask region);

}  // namespace fermicert

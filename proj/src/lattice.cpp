// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fermicert/error.hpp"

namespace fermicert {

MetricGraph::MetricGraph(SiteSetPtr sites, std::vector<double> distances)
    : sites_(std::move(sites)), distances_(std::move(distances)) {
  if (distances_.size() != sites_->size() * sites_->size()) {
    throw Error(ErrorCode::dimension_mismatch, "distance table must be |sites|^2");
  }
  for (double d : distances_) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::domain, "distances must be finite and non-negative");
    }
  }
  if (metric_defect() > 1e-12) throw Error(ErrorCode::domain, "distance table is not a metric");
}

MetricGraph MetricGraph::chain(std::size_t length, Boundary boundary) {
  return slab({static_cast<int>(length)}, boundary);
}

MetricGraph MetricGraph::slab(const std::vector<int>& sides, Boundary boundary) {
  if (sides.empty()) throw Error(ErrorCode::domain, "slab needs at least one side length");
  std::size_t count = 1;
  for (int s : sides) {
    if (s < 1) throw Error(ErrorCode::domain, "slab side lengths must be positive");
    count *= static_cast<std::size_t>(s);
  }
  std::vector<Site> sites;
  sites.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Site site(sides.size());
    std::size_t rest = k;
    for (std::size_t d = 0; d < sides.size(); ++d) {
      site[d] = static_cast<int>(rest % static_cast<std::size_t>(sides[d]));
      rest /= static_cast<std::size_t>(sides[d]);
    }
    sites.push_back(std::move(site));
  }
  std::vector<double> dist(count * count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      int total = 0;
      for (std::size_t d = 0; d < sides.size(); ++d) {
        int delta = std::abs(sites[i][d] - sites[j][d]);
        if (boundary == Boundary::periodic) delta = std::min(delta, sides[d] - delta);
        total += delta;
      }
      dist[i * count + j] = total;
    }
  }
  auto ptr = std::make_shared<const SiteSet>(std::move(sites));
  return MetricGraph(std::move(ptr), std::move(dist));
}

double MetricGraph::metric_defect() const {
  const std::size_t n = size();
  double worst = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    worst = std::max(worst, std::abs(distance(x, x)));
    for (std::size_t y = 0; y < n; ++y) {
      worst = std::max(worst, std::abs(distance(x, y) - distance(y, x)));
      for (std::size_t z = 0; z < n; ++z) {
        worst = std::max(worst, distance(x, y) - distance(x, z) - distance(z, y));
      }
    }
  }
  return worst;
}

double DecayFunction::operator()(double r) const {
  return std::exp(-a * r) / std::pow(1.0 + r, nu + epsilon);
}

namespace {

void check_decay(const DecayFunction& f) {
  if (!(f.nu > 0.0) || !(f.epsilon > 0.0) || !(f.a >= 0.0)) {
    throw Error(ErrorCode::domain, "decay function needs nu > 0, epsilon > 0, a >= 0");
  }
}

Eigen::MatrixXd decay_table(const DecayFunction& f, const MetricGraph& graph) {
  check_decay(f);
  const auto n = static_cast<Eigen::Index>(graph.size());
  Eigen::MatrixXd table(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      table(x, y) = f(graph.distance(static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
    }
  }
  return table;
}

double max_convolution_ratio(const Eigen::MatrixXd& table) {
  const Eigen::MatrixXd conv = table * table;
  return (conv.array() / table.array()).maxCoeff();
}

}  // namespace

double f_norm(const DecayFunction& f, const MetricGraph& graph) {
  return decay_table(f, graph).rowwise().sum().maxCoeff();
}

double f_conv_constant(const DecayFunction& f, const MetricGraph& graph) {
  return max_convolution_ratio(decay_table(f, graph));
}

GFunction::GFunction(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols() || values_.rows() == 0) {
    throw Error(ErrorCode::dimension_mismatch, "G must be a non-empty square table");
  }
  if (!(values_.array() > 0.0).all()) {
    throw Error(ErrorCode::domain, "G must be strictly positive");
  }
  norm_ = values_.rowwise().sum().maxCoeff();
}

double GFunction::convolution_ratio() const { return max_convolution_ratio(values_); }

double GFunction::symmetry_defect() const {
  return (values_ - values_.transpose()).cwiseAbs().maxCoeff();
}

GFunction GFunction::weighted(const std::vector<double>& g) const {
  if (g.size() != size()) throw Error(ErrorCode::dimension_mismatch, "weight per site required");
  for (double v : g) {
    if (!(v > 0.0 && v <= 1.0)) throw Error(ErrorCode::domain, "weights must lie in (0, 1]");
  }
  const Eigen::Map<const Eigen::VectorXd> w(g.data(), static_cast<Eigen::Index>(g.size()));
  return GFunction(w.asDiagonal() * values_ * w.asDiagonal());
}

GFunction g_from_f(const DecayFunction& f, const MetricGraph& graph) {
  const Eigen::MatrixXd table = decay_table(f, graph);
  const double c = max_convolution_ratio(table);
  if (!std::isfinite(c) || c <= 0.0) throw Error(ErrorCode::domain, "convolution constant undefined");
  return GFunction(table / c);
}

std::vector<double> uniform_grid(double s, double t, int intervals) {
  if (intervals < 1) throw Error(ErrorCode::domain, "grid needs at least one interval");
  std::vector<double> grid(static_cast<std::size_t>(intervals) + 1);
  for (int k = 0; k <= intervals; ++k) {
    grid[static_cast<std::size_t>(k)] = s + (t - s) * static_cast<double>(k) / intervals;
  }
  grid.back() = t;
  return grid;
}

double interaction_g_norm(const Interaction& phi, const GFunction& g, double t) {
  const std::size_t n = phi.ambient()->size();
  if (g.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "G-function and interaction lattices differ");
  }
  if (phi.empty()) return 0.0;
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (SiteMask z : phi.supports()) {
    const double norm = phi.value_norm(z, t);
    if (norm == 0.0) continue;
    const auto sites = phi.ambient()->indices(z);
    for (auto x : sites) {
      for (auto y : sites) sums(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += norm;
    }
  }
  return (sums.array() / g.values().array()).maxCoeff();
}

double interaction_g_norm_integral(const Interaction& phi, const GFunction& g, double s, double t,
                                   int intervals) {
  if (t == s) return 0.0;
  if (phi.is_time_independent()) return (t - s) * interaction_g_norm(phi, g, s);
  const int n = intervals + (intervals % 2);
  const double h = (t - s) / n;
  double acc = interaction_g_norm(phi, g, s) + interaction_g_norm(phi, g, t);
  for (int k = 1; k < n; ++k) {
    acc += (k % 2 ? 4.0 : 2.0) * interaction_g_norm(phi, g, s + k * h);
  }
  return acc * h / 3.0;
}

std::vector<SiteMask> surface_sets(SiteMask lambda, SiteMask region, const Interaction& phi) {
  phi.ambient()->check_mask(lambda);
  if (!is_subset(region, lambda)) throw Error(ErrorCode::domain, "X must be a subset of Lambda");
  std::vector<SiteMask> out;
  const SiteMask outside = lambda & ~region;
  for (SiteMask z : phi.supports()) {
    if (is_subset(z, lambda) && (z & region) && (z & outside)) out.push_back(z);
  }
  return out;
}

SiteMask phi_boundary(const Interaction& phi, SiteMask region, double s, double t, int intervals) {
  const SiteMask lambda = phi.ambient()->all();
  const auto grid = uniform_grid(s, t, std::max(1, intervals));
  SiteMask boundary = 0;
  for (SiteMask z : surface_sets(lambda, region, phi)) {
    for (double r : grid) {
      if (phi.value_norm(z, r) > 0.0) {
        boundary |= z & region;
        break;
      }
    }
  }
  return boundary;
}

SiteMask phi_boundary(const Interaction& phi, SiteMask region) {
  return phi_boundary(phi, region, 0.0, 0.0, 1);
}

}  // namespace fermicert

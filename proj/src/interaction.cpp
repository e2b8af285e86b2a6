// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/interaction.hpp"

#include <algorithm>
#include <cmath>

#include "fermicert/error.hpp"

namespace fermicert {

TimeProfile::TimeProfile(std::vector<double> breakpoints,
                         std::vector<std::vector<double>> coefficients)
    : breakpoints_(std::move(breakpoints)), coefficients_(std::move(coefficients)) {
  if (breakpoints_.empty() || coefficients_.size() != breakpoints_.size()) {
    throw Error(ErrorCode::domain, "time profile needs one coefficient list per breakpoint");
  }
  if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end())) {
    throw Error(ErrorCode::domain, "time profile breakpoints must be sorted");
  }
  for (auto& c : coefficients_) {
    if (c.empty()) c.push_back(0.0);
  }
  // Continuity across breakpoints.
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
    const double dt = breakpoints_[k + 1] - breakpoints_[k];
    double left = 0.0;
    double power = 1.0;
    for (double c : coefficients_[k]) {
      left += c * power;
      power *= dt;
    }
    const double right = coefficients_[k + 1][0];
    if (std::abs(left - right) > 1e-12 * std::max(1.0, std::abs(left))) {
      throw Error(ErrorCode::domain, "time profile must be continuous");
    }
  }
}

TimeProfile TimeProfile::constant(double value) { return TimeProfile({0.0}, {{value}}); }

TimeProfile TimeProfile::linear_ramp(double t0, double t1, double v0, double v1) {
  if (!(t1 > t0)) throw Error(ErrorCode::domain, "linear ramp needs t1 > t0");
  return TimeProfile({-std::numeric_limits<double>::max(), t0, t1},
                     {{v0}, {v0, (v1 - v0) / (t1 - t0)}, {v1}});
}

double TimeProfile::operator()(double t) const {
  std::size_t k = 0;
  while (k + 1 < breakpoints_.size() && t >= breakpoints_[k + 1]) ++k;
  const auto& c = coefficients_[k];
  if (c.size() == 1) return c[0];
  const double x = t - breakpoints_[k];
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

bool TimeProfile::is_constant() const {
  const double v = coefficients_.front()[0];
  for (const auto& c : coefficients_) {
    if (c[0] != v) return false;
    for (std::size_t j = 1; j < c.size(); ++j) {
      if (c[j] != 0.0) return false;
    }
  }
  return true;
}

Interaction::Interaction(SiteSetPtr ambient, double t_min, double t_max)
    : ambient_(std::move(ambient)), t_min_(t_min), t_max_(t_max) {
  if (!ambient_) throw Error(ErrorCode::domain, "Interaction requires a SiteSet");
  if (!(t_max_ >= t_min_)) throw Error(ErrorCode::domain, "empty time interval");
}

double InteractionTerm::op_norm() const {
  std::call_once(norm_cache->once, [this] { norm_cache->value = fermicert::op_norm(op); });
  return norm_cache->value;
}

void Interaction::add_term(SiteMask support, FockOperator op, TimeProfile profile,
                           std::string label) {
  ambient_->check_mask(support);
  if (!(*op.ambient() == *ambient_)) {
    throw Error(ErrorCode::dimension_mismatch, "interaction term acts on a different lattice");
  }
  if (!is_subset(op.support(), support)) {
    throw Error(ErrorCode::domain, "term operator support exceeds its subset");
  }
  const double scale = std::max(1.0, norm_upper_bound(op.matrix()));
  if (hermiticity_defect(op.matrix()) > 1e-12 * scale) {
    throw Error(ErrorCode::not_hermitian, "interaction terms must be self-adjoint");
  }
  auto [it, inserted] = by_support_.try_emplace(support);
  if (inserted) order_.push_back(support);
  it->second.push_back(terms_.size());
  terms_.push_back({support, std::move(op), std::move(profile), std::move(label)});
}

bool Interaction::is_even() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const InteractionTerm& t) { return t.op.parity() == Parity::even; });
}

bool Interaction::is_time_independent() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const InteractionTerm& t) { return t.profile.is_constant(); });
}

std::vector<SiteMask> Interaction::supports() const { return order_; }

FockOperator Interaction::value(SiteMask z, double t) const {
  const auto it = by_support_.find(z);
  const auto dim = static_cast<Eigen::Index>(ambient_->dimension());
  if (it == by_support_.end()) {
    return FockOperator(ambient_, z, Matrix::Zero(dim, dim), Parity::even);
  }
  Matrix m = Matrix::Zero(dim, dim);
  Parity p = terms_[it->second.front()].op.parity();
  for (auto idx : it->second) {
    const auto& term = terms_[idx];
    m += term.profile(t) * term.op.matrix();
    if (term.op.parity() != p) p = Parity::mixed;
  }
  if (p == Parity::mixed) p = classify_parity(m);
  return FockOperator(ambient_, z, std::move(m), p);
}

double Interaction::value_norm(SiteMask z, double t) const {
  const auto it = by_support_.find(z);
  if (it == by_support_.end()) return 0.0;
  if (it->second.size() == 1) {
    const auto& term = terms_[it->second.front()];
    return std::abs(term.profile(t)) * term.op_norm();
  }
  return op_norm(value(z, t));
}

Interaction Interaction::scaled(double factor) const {
  Interaction out(ambient_, t_min_, t_max_);
  for (const auto& term : terms_) {
    out.add_term(term.support, term.op.scaled(factor), term.profile, term.label);
  }
  return out;
}

}  // namespace fermicert

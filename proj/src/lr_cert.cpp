// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/lr_cert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fermicert/error.hpp"
#include "fermicert/parallel.hpp"

namespace fermicert {

const char* bracket_mode_name(BracketMode mode) {
  return mode == BracketMode::commutator ? "commutator" : "anticommutator";
}

double lr_rhs(double norm_a, double norm_b, double phi_norm_integral, double geometry) {
  if (norm_a < 0.0 || norm_b < 0.0 || phi_norm_integral < 0.0 || geometry < 0.0) {
    throw Error(ErrorCode::domain, "Lieb-Robinson bound inputs must be non-negative");
  }
  return 2.0 * norm_a * norm_b * std::expm1(2.0 * phi_norm_integral) * geometry;
}

int delta_indicator(SiteMask x, SiteMask y) { return (x & y) ? 1 : 0; }

double LRBoundReport::max_ratio() const {
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, p.ratio);
  return worst;
}

namespace {

void check_pair(const FockOperator& a, const FockOperator& b, BracketMode mode) {
  if (!a.same_ambient(b)) {
    throw Error(ErrorCode::precondition, "A and B act on different lattices");
  }
  if (a.support() & b.support()) {
    throw Error(ErrorCode::precondition, "A and B must have disjoint supports");
  }
  const double scale = std::max(1e-300, op_norm(a) * op_norm(b));
  if (mode == BracketMode::commutator) {
    if (a.parity() != Parity::even && b.parity() != Parity::even) {
      throw Error(ErrorCode::precondition, "commutator mode requires A or B to be even");
    }
    if (op_norm(commutator(a, b)) > 1e-12 * scale) {
      throw Error(ErrorCode::precondition, "[A, B] does not vanish");
    }
  } else {
    if (a.parity() != Parity::odd || b.parity() != Parity::odd) {
      throw Error(ErrorCode::precondition, "anticommutator mode requires A and B to be odd");
    }
    if (op_norm(anticommutator(a, b)) > 1e-12 * scale) {
      throw Error(ErrorCode::precondition, "{A, B} does not vanish");
    }
  }
}

}  // namespace

LRBoundReport certify(const FockOperator& a, const FockOperator& b, const Interaction& phi,
                      const GFunction& g, double s, std::span<const double> times,
                      BracketMode mode, const CertifyOptions& options) {
  check_pair(a, b, mode);
  if (!(*a.ambient() == *phi.ambient())) {
    throw Error(ErrorCode::precondition, "observables and interaction act on different lattices");
  }
  if (g.size() != a.ambient()->size()) {
    throw Error(ErrorCode::precondition, "G-function does not match the lattice");
  }
  if (times.empty()) throw Error(ErrorCode::precondition, "empty time grid");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < s || (k > 0 && times[k] < times[k - 1])) {
      throw Error(ErrorCode::precondition, "time grid must be non-decreasing and start at or after s");
    }
  }

  LRBoundReport report;
  report.mode = mode;
  report.ambient = a.ambient();
  report.support_a = a.support();
  report.support_b = b.support();
  report.parity_a = a.parity();
  report.parity_b = b.parity();
  report.norm_a = op_norm(a);
  report.norm_b = op_norm(b);
  report.start = s;
  report.g_norm = g.norm();
  report.boundary = phi_boundary(phi, a.support(), s, times.back(), options.quadrature_intervals);
  for (auto x : a.ambient()->indices(report.boundary)) {
    for (auto y : a.ambient()->indices(b.support())) report.geometry += g(x, y);
  }

  const auto propagators = propagate_grid(phi, s, times, options.step);
  report.points.resize(times.size());
  parallel_for(times.size(), [&](std::size_t k) {
    const FockOperator evolved = heisenberg(a, propagators[k]);
    const FockOperator bracket =
        mode == BracketMode::commutator ? commutator(evolved, b) : anticommutator(evolved, b);
    LRPoint& p = report.points[k];
    p.t = times[k];
    p.measured = op_norm(bracket);
    p.phi_integral =
        interaction_g_norm_integral(phi, g, s, times[k], options.quadrature_intervals);
    p.bound = lr_rhs(report.norm_a, report.norm_b, p.phi_integral, report.geometry);
    if (p.bound > 0.0) {
      p.ratio = p.measured / p.bound;
    } else {
      p.ratio = p.measured <= options.absolute_floor ? 0.0 : std::numeric_limits<double>::infinity();
    }
  });
  for (const auto& u : propagators) {
    report.max_unitarity_defect = std::max(report.max_unitarity_defect, u.unitarity_defect);
  }

  const LRPoint* worst = nullptr;
  double worst_excess = 0.0;
  for (const auto& p : report.points) {
    const double excess = p.measured - (p.bound * (1.0 + options.relative_slack) + options.absolute_floor);
    if (excess > worst_excess) {
      worst_excess = excess;
      worst = &p;
    }
  }
  if (worst) throw CertificationFailed(worst->t, worst->measured, worst->bound);
  return report;
}

SeriesDiagnostics series_diagnostics(const SeriesInputs& in, int order) {
  if (order < 1) throw Error(ErrorCode::domain, "series order must be at least 1");
  SeriesDiagnostics out;
  const double x = 2.0 * in.phi_integral;
  const double prefactor = 2.0 * in.norm_a * in.norm_b;
  double power_over_factorial = 1.0;
  double sum = 0.0;
  for (int n = 1; n <= order; ++n) {
    power_over_factorial *= x / n;
    const double term = power_over_factorial * in.geometry;
    out.term_bounds.push_back(term);
    sum += term;
    out.partial_sums.push_back(prefactor * sum);
  }
  power_over_factorial *= x / (order + 1);
  out.remainder_bound = 2.0 * in.norm_b * static_cast<double>(in.boundary_size) * in.g_norm *
                        power_over_factorial;
  out.closed_form = lr_rhs(in.norm_a, in.norm_b, in.phi_integral, in.geometry);
  return out;
}

std::string report_csv(const LRBoundReport& report) {
  std::ostringstream os;
  os << "t,measured,bound,ratio,mode\n";
  char line[256];
  for (const auto& p : report.points) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%s\n", p.t, p.measured, p.bound,
                  p.ratio, bracket_mode_name(report.mode));
    os << line;
  }
  return os.str();
}

}  // namespace fermicert

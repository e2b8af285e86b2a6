// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <Eigen/Sparse>
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fermicert/cond_exp.hpp"
#include "fermicert/dynamics.hpp"
#include "fermicert/error.hpp"
#include "fermicert/gap.hpp"
#include "fermicert/lr_cert.hpp"
#include "fermicert/models.hpp"

using namespace fermicert;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// Runs a criterion body; exceptions count as failure.
void criterion(int id, const std::function<std::string(bool&)>& body) {
  bool ok = true;
  std::string detail;
  try {
    detail = body(ok);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  report(id, ok, detail);
}

using Sparse = Eigen::SparseMatrix<cplx>;

Sparse sparse_of(const FockOperator& a) { return a.matrix().sparseView(); }

// Operator-norm upper bound sqrt(||M||_1 ||M||_inf).
double sparse_norm_bound(const Sparse& m) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(m.cols());
  Eigen::VectorXd row = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (Sparse::InnerIterator it(m, k); it; ++it) {
      col[it.col()] += std::abs(it.value());
      row[it.row()] += std::abs(it.value());
    }
  }
  return std::sqrt(col.maxCoeff() * row.maxCoeff());
}

std::string c1_car(bool& ok) {
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::size_t l = 2; l <= 10; ++l) {
    const auto lambda = SiteSet::chain(l);
    const Eigen::Index dim = static_cast<Eigen::Index>(lambda->dimension());
    Sparse id(dim, dim);
    id.setIdentity();
    std::vector<Sparse> a, c;
    for (std::size_t x = 0; x < l; ++x) {
      a.push_back(sparse_of(build_annihilator(lambda, x)));
      c.push_back(a.back().adjoint());
    }
    for (std::size_t x = 0; x < l; ++x) {
      for (std::size_t y = 0; y < l; ++y) {
        Sparse mixed = a[x] * c[y] + c[y] * a[x];
        if (x == y) mixed -= id;
        const Sparse aa = a[x] * a[y] + a[y] * a[x];
        const Sparse cc = c[x] * c[y] + c[y] * c[x];
        worst = std::max({worst, sparse_norm_bound(mixed), sparse_norm_bound(aa), sparse_norm_bound(cc)});
      }
    }
  }
  const double t = seconds_since(start);
  ok = worst <= 1e-12 && t <= 30.0;
  return fmt("max CAR defect %.3g", worst) + fmt(", %.1f s", t);
}

std::string c2_disjoint(bool& ok) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int pairs = 0;
  for (std::size_t l = 4; l <= 8; ++l) {
    const auto lambda = SiteSet::chain(l);
    for (int k = 0; k < 100; ++k) {
      std::vector<std::size_t> order(l);
      for (std::size_t i = 0; i < l; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      const std::size_t na = 1 + rng() % 3;
      const std::size_t nb = 1 + rng() % std::min<std::size_t>(3, l - na);
      SiteMask xa = 0, xb = 0;
      for (std::size_t i = 0; i < na; ++i) xa |= site_bit(order[i]);
      for (std::size_t i = 0; i < nb; ++i) xb |= site_bit(order[na + i]);
      const Parity pa = rng() % 2 ? Parity::odd : Parity::even;
      const Parity pb = rng() % 2 ? Parity::odd : Parity::even;
      const auto a = random_local_operator(lambda, xa, pa, rng);
      const auto b = random_local_operator(lambda, xb, pb, rng);
      const bool both_odd = pa == Parity::odd && pb == Parity::odd;
      const double d = op_norm(both_odd ? anticommutator(a, b) : commutator(a, b));
      worst = std::max(worst, d / std::max(1.0, op_norm(a) * op_norm(b)));
      ++pairs;
    }
  }
  ok = worst <= 1e-12;
  return std::to_string(pairs) + " pairs" + fmt(", max defect %.3g", worst);
}

struct LRRun {
  LRBoundReport report;
  double seconds = 0.0;
};

LRRun lr_case(const Interaction& phi, const FockOperator& a, const FockOperator& b, BracketMode mode) {
  const auto start = Clock::now();
  const std::size_t l = phi.ambient()->size();
  const GFunction g = g_from_f(DecayFunction{1.0, 1.0, 0.0}, MetricGraph::chain(l));
  const auto times = uniform_grid(0.0, 2.0, 40);
  LRRun run{certify(a, b, phi, g, 0.0, times, mode), 0.0};
  run.seconds = seconds_since(start);
  return run;
}

LRRun hopping_run;

std::string c3_lieb_robinson(bool& ok) {
  const auto start = Clock::now();
  const auto phi = hopping_chain(8, 1.0, 0.0);
  const auto lambda = phi.ambient();
  hopping_run = lr_case(phi, number_operator(lambda, 0b00000001), number_operator(lambda, 0b10000000),
                        BracketMode::commutator);
  const auto anti = lr_case(phi, build_annihilator(lambda, 0), build_annihilator(lambda, 7),
                            BracketMode::anticommutator);
  const auto ramped_phi = ramped_hopping_chain(8, 0.5, 1.5, 0.0, 2.0, 0.3);
  const auto ramped = lr_case(ramped_phi, number_operator(lambda, 0b00000001),
                              number_operator(lambda, 0b10000000), BracketMode::commutator);
  const double t = seconds_since(start);
  const double r1 = hopping_run.report.max_ratio();
  const double r2 = anti.report.max_ratio();
  const double r3 = ramped.report.max_ratio();
  ok = r1 < 1.0 && r2 < 1.0 && r3 < 1.0 && hopping_run.report.points.size() == 41 && t <= 120.0;
  return fmt("max ratio commutator %.3g", r1) + fmt(", anticommutator %.3g", r2) +
         fmt(", ramped %.3g", r3) + fmt(", %.1f s", t);
}

// The order-30 check is meaningful while 2I stays moderate; it is applied to
// every grid point of the hopping run with I <= 2.5. The order needed at the
// final time is reported alongside.
std::string c4_series(bool& ok) {
  if (hopping_run.report.points.empty()) {
    ok = false;
    return "no Lieb-Robinson report available";
  }
  const auto& r = hopping_run.report;
  SeriesInputs in;
  in.norm_a = r.norm_a;
  in.norm_b = r.norm_b;
  in.geometry = r.geometry;
  in.boundary_size = static_cast<std::size_t>(std::popcount(r.boundary));
  in.g_norm = r.g_norm;
  const double scale = 2.0 * in.norm_a * in.norm_b;
  auto relative_error = [&](const SeriesDiagnostics& d) {
    return std::abs(d.partial_sums.back() - d.closed_form) / std::max(d.closed_form, 1e-300);
  };
  double conv = 0.0, rem = 0.0, t_max = 0.0;
  int checked = 0;
  for (const auto& p : r.points) {
    if (p.phi_integral == 0.0 || p.phi_integral > 2.5) continue;
    in.phi_integral = p.phi_integral;
    const auto d = series_diagnostics(in, 30);
    conv = std::max(conv, relative_error(d));
    rem = std::max(rem, d.remainder_bound / scale);
    t_max = p.t;
    ++checked;
  }
  in.phi_integral = r.points.back().phi_integral;
  int needed = 30;
  while (needed < 400 && relative_error(series_diagnostics(in, needed)) > 1e-10) ++needed;
  ok = checked > 0 && conv <= 1e-10 && rem < 1e-12;
  return std::to_string(checked) + fmt(" points with t <= %.2f", t_max) +
         fmt(": relative partial-sum error %.3g", conv) + fmt(", remainder / scale %.3g", rem) +
         fmt("; at t = 2 (I = %.4g) ", in.phi_integral) + "order " + std::to_string(needed) + " is needed";
}

std::string c5_constants(bool& ok) {
  double worst_ratio = 0.0;
  double worst_residual = 0.0;
  const std::vector<std::vector<int>> slabs = {{9}, {16}, {4, 4}, {5, 3}};
  for (const auto& sides : slabs) {
    const auto graph = MetricGraph::slab(sides);
    for (double nu : {1.0, 2.0}) {
      const DecayFunction f{nu, 1.0, 0.0};
      const double c = f_conv_constant(f, graph);
      const double limit = std::pow(2.0, nu + 1.0) * f_norm(f, graph);
      worst_ratio = std::max(worst_ratio, c / limit);
      const GFunction g = g_from_f(f, graph);
      worst_residual = std::max(worst_residual, std::max(0.0, g.convolution_ratio() - 1.0));
    }
  }
  ok = worst_ratio <= 1.0 && worst_residual <= 1e-12;
  return fmt("max C / (2^(nu+eps) ||F||) %.4g", worst_ratio) +
         fmt(", G convolution residual %.3g", worst_residual);
}

std::string c6_cond_exp(bool& ok) {
  const auto start = Clock::now();
  std::mt19937_64 rng(6);
  const auto lambda = SiteSet::chain(6);
  const SiteMask x = 0b000111;
  double proj = 0.0, contraction = 0.0, sweep = 0.0, ef = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto a = random_local_operator(lambda, lambda->all(), Parity::mixed, rng);
    const auto e = cond_exp_E(a, x);
    proj = std::max(proj, op_norm(cond_exp_E(e, x) - e));
    contraction = std::max(contraction, op_norm(e) - op_norm(a));
    const auto even = random_local_operator(lambda, lambda->all(), Parity::even, rng);
    ef = std::max(ef, op_norm(cond_exp_E(even, x) - cond_exp_F(even, x)));
  }
  for (SiteMask region : {SiteMask{0b011111}, SiteMask{0b101101}, SiteMask{0b010101}, SiteMask{0b110000}}) {
    for (int k = 0; k < 10; ++k) {
      const auto a = random_local_operator(lambda, lambda->all(), Parity::mixed, rng);
      sweep = std::max(sweep, op_norm(cond_exp_E(a, region) - cond_exp_E_krauss_sum(a, region)));
    }
  }
  const auto fam = verify_expectation_family(lambda, 0b000111, 0b011100, 100, rng);
  const double family = std::max({fam.composition, fam.product, fam.volume});
  bool lemma = true;
  for (int k = 0; k < 20; ++k) {
    const auto a = random_local_operator(lambda, lambda->all(), Parity::even, rng);
    const auto la = local_approximation(a, x);
    lemma = lemma && la.bound_exact && la.error <= la.commutator_bound;
  }
  const double t = seconds_since(start);
  ok = proj <= 1e-12 && contraction <= 1e-12 && sweep <= 1e-12 && ef <= 1e-12 && family <= 1e-12 &&
       lemma && t <= 180.0;
  return fmt("projection %.2g", proj) + fmt(", norm %.2g", std::max(0.0, contraction)) +
         fmt(", sweep/Krauss %.2g", sweep) + fmt(", E-F %.2g", ef) + fmt(", family %.2g", family) +
         (lemma ? ", local approximation holds" : ", local approximation VIOLATED") + fmt(", %.1f s", t);
}

std::string c7_flat_band(bool& ok) {
  std::string detail;
  ok = true;
  for (std::size_t l : {std::size_t{6}, std::size_t{8}}) {
    const auto orbitals = brick_wall_orbitals(l, 0.3, 0.2);
    const auto phi = flat_band_model(orbitals);
    const auto h = local_hamiltonian(phi, 0.0);
    const auto ev = spectrum(h);
    const double gap = ev[1] - ev[0];
    const auto ff = frustration_free_check(phi);
    const auto p = kernel_projection(h);
    const double norm = p.matrix().trace().real();
    const auto modes = band_operators(orbitals);
    double occupation = 0.0;
    for (const auto& b : modes.valence) {
      occupation = std::max(occupation, std::abs((p.matrix() * (b.adjoint() * b).matrix()).trace() / norm - 1.0));
    }
    for (const auto& c : modes.conduction) {
      occupation = std::max(occupation, std::abs((p.matrix() * (c.adjoint() * c).matrix()).trace() / norm));
    }
    const bool good = std::abs(gap - 1.0) <= 1e-10 && std::abs(ff.residual) <= 1e-10 &&
                      ff.frustration_free && occupation <= 1e-10;
    ok = ok && good;
    detail += "L=" + std::to_string(l) + fmt(": gap %.12f", gap) + fmt(", residual %.2g", ff.residual) +
              fmt(", occupation defect %.2g; ", occupation);
  }
  return detail;
}

std::string c8_martingale(bool& ok) {
  ok = true;
  std::string detail;
  auto bit_exact = [](const GapCertificate& c) {
    if (!c.ell || !c.bound) return false;
    const double x = c.epsilon * std::sqrt(1.0 + static_cast<double>(*c.ell));
    return *c.bound == c.gamma * (1.0 - x) * (1.0 - x);
  };
  const auto toy = martingale_certificate(left_to_right_sequence(number_chain(6)));
  const bool toy_ok = bit_exact(toy) && std::abs(*toy.bound - 1.0) <= 1e-10 &&
                      std::abs(*toy.exact_gap - 1.0) <= 1e-10;
  ok = ok && toy_ok;
  detail += fmt("toy bound %.12f", toy.bound.value_or(NAN)) + fmt(" exact %.12f", toy.exact_gap.value_or(NAN));
  struct Case {
    std::string name;
    Interaction phi;
  };
  std::vector<Case> cases;
  for (std::size_t l : {6, 7, 8}) cases.push_back({"kitaev L=" + std::to_string(l), kitaev_chain(l)});
  for (std::size_t l : {6, 8}) cases.push_back({"flat L=" + std::to_string(l), flat_band_model(brick_wall_orbitals(l, 0.3, 0.2))});
  for (const auto& c : cases) {
    const auto cert = martingale_certificate(left_to_right_sequence(c.phi));
    const bool good = bit_exact(cert) && *cert.bound > 0.0 && cert.exact_gap &&
                      *cert.bound <= *cert.exact_gap + 1e-8;
    ok = ok && good;
    detail += "; " + c.name + fmt(": bound %.6g", cert.bound.value_or(NAN)) +
              fmt(" <= gap %.6g", cert.exact_gap.value_or(NAN));
  }
  return detail;
}

std::string c9_flow(bool& ok) {
  const auto start = Clock::now();
  const auto grid = uniform_grid(0.0, 1.0, 20);
  const auto report = projection_flow(
      std::function<Interaction(double)>([](double s) { return rotated_flat_band(6, s); }), grid, 0.5);
  bool closure = false;
  std::string where;
  try {
    projection_flow(std::function<Interaction(double)>([](double s) { return closing_flat_band(6, s); }),
                    grid, 0.25);
  } catch (const GapClosure& e) {
    closure = std::abs(e.location - 0.375) <= 1e-3;
    where = fmt(", closure located at s = %.6f", e.location) + fmt(" (grid %.2f)", e.grid_point);
  }
  ok = report.points.size() == 21 && report.rank_constant && report.max_defect <= 1e-6 && closure;
  return fmt("max transport defect %.3g", report.max_defect) +
         (report.rank_constant ? ", rank constant" : ", rank changed") +
         (closure ? where : ", no closure detected") + fmt(", %.1f s", seconds_since(start));
}

std::string slurp_without_timestamp(const fs::path& p) {
  std::ifstream in(p);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
  }
  return out;
}

std::string c10_end_to_end(bool& ok) {
  const auto start = Clock::now();
  const fs::path base = fs::temp_directory_path() / "fermicert_acceptance";
  fs::remove_all(base);
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(FERMICERT_CONFIG_DIR)) {
    if (e.path().extension() == ".json") configs.push_back(e.path());
  }
  std::sort(configs.begin(), configs.end());
  ok = !configs.empty();
  int nonzero = 0, mismatched = 0;
  for (const auto& cfg : configs) {
    for (int pass = 0; pass < 2; ++pass) {
      const fs::path out = base / std::to_string(pass) / cfg.stem();
      fs::create_directories(out);
      const std::string cmd = std::string("\"") + FERMICERT_CLI_PATH + "\" run --config \"" + cfg.string() +
                              "\" --out \"" + out.string() + "\" > \"" + (out / "stdout.txt").string() + "\"";
      const int status = std::system(cmd.c_str());
      if (status != 0) ++nonzero;
    }
    for (const auto& e : fs::directory_iterator(base / "0" / cfg.stem())) {
      if (e.path().filename() == "stdout.txt") continue;
      const fs::path twin = base / "1" / cfg.stem() / e.path().filename();
      if (!fs::exists(twin) || slurp_without_timestamp(e.path()) != slurp_without_timestamp(twin)) ++mismatched;
    }
  }
  const double t = seconds_since(start);
  ok = ok && nonzero == 0 && mismatched == 0 && t / 2.0 <= 900.0;
  return std::to_string(configs.size()) + " configs, " + std::to_string(nonzero) + " nonzero exits, " +
         std::to_string(mismatched) + " differing files" + fmt(", %.1f s for two passes", t);
}

}  // namespace

int main() {
  const auto start = Clock::now();
  criterion(1, c1_car);
  criterion(2, c2_disjoint);
  criterion(3, c3_lieb_robinson);
  criterion(4, c4_series);
  criterion(5, c5_constants);
  criterion(6, c6_cond_exp);
  criterion(7, c7_flat_band);
  criterion(8, c8_martingale);
  criterion(9, c9_flow);
  criterion(10, c10_end_to_end);
  std::printf("%d of 10 criteria failed, %.1f s total\n", failures, seconds_since(start));
  return failures;
}

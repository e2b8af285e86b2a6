// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/fermicert.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "fermicert/cond_exp.hpp"
#include "fermicert/error.hpp"
#include "fermicert/experiment.hpp"
#include "fermicert/parallel.hpp"

struct fc_lattice {
  fermicert::SiteSetPtr sites;
};

struct fc_operator {
  fermicert::FockOperator op;
};

namespace {

thread_local std::string g_last_error;

fc_status fail(fc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
fc_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const fermicert::Error& e) {
    return fail(static_cast<fc_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FC_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fc_status emit(fermicert::FockOperator op, fc_operator** out) {
  *out = new fc_operator{std::move(op)};
  return FC_OK;
}

#define FC_REQUIRE(cond)                                                 \
  do {                                                                   \
    if (!(cond)) return fail(FC_ERR_INVALID_ARGUMENT, "null argument");  \
  } while (0)

}  // namespace

extern "C" {

const char* fc_version(void) { return fermicert::kVersion; }

const char* fc_last_error(void) { return g_last_error.c_str(); }

const char* fc_status_name(fc_status status) {
  switch (status) {
    case FC_OK: return "ok";
    case FC_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case FC_ERR_INTERNAL: return "internal";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= 12) {
    return fermicert::error_code_name(static_cast<fermicert::ErrorCode>(code));
  }
  return "unknown";
}

void fc_string_free(char* s) { std::free(s); }

fc_status fc_set_threads(int threads) {
  if (threads < 1) return fail(FC_ERR_INVALID_ARGUMENT, "thread count must be positive");
  return guarded([&] {
    fermicert::set_thread_count(static_cast<std::size_t>(threads));
    return FC_OK;
  });
}

fc_status fc_lattice_chain(size_t sites, fc_lattice** out) {
  FC_REQUIRE(out);
  return guarded([&] {
    if (sites < 1 || sites > fermicert::kMaxSites) {
      return fail(FC_ERR_SIZE_LIMIT, "chain length must lie in [1, 20]");
    }
    *out = new fc_lattice{fermicert::SiteSet::chain(sites)};
    return FC_OK;
  });
}

void fc_lattice_free(fc_lattice* lattice) { delete lattice; }

fc_status fc_lattice_size(const fc_lattice* lattice, size_t* out) {
  FC_REQUIRE(lattice && out);
  *out = lattice->sites->size();
  return FC_OK;
}

fc_status fc_operator_annihilator(const fc_lattice* lattice, size_t site, fc_operator** out) {
  FC_REQUIRE(lattice && out);
  return guarded([&] { return emit(fermicert::build_annihilator(lattice->sites, site), out); });
}

fc_status fc_operator_creator(const fc_lattice* lattice, size_t site, fc_operator** out) {
  FC_REQUIRE(lattice && out);
  return guarded([&] { return emit(fermicert::build_creator(lattice->sites, site), out); });
}

fc_status fc_operator_number(const fc_lattice* lattice, uint64_t region, fc_operator** out) {
  FC_REQUIRE(lattice && out);
  return guarded([&] {
    lattice->sites->check_mask(region);
    return emit(fermicert::number_operator(lattice->sites, region), out);
  });
}

fc_status fc_operator_monomial(const fc_lattice* lattice, const char* label, fc_operator** out) {
  FC_REQUIRE(lattice && label && out);
  return guarded([&] {
    fermicert::MonomialLabel m;
    for (const char* p = label; *p; ++p) {
      switch (*p) {
        case 'I': m.symbols.push_back(fermicert::MonomialSymbol::identity); break;
        case 'a': m.symbols.push_back(fermicert::MonomialSymbol::annihilate); break;
        case 'c': m.symbols.push_back(fermicert::MonomialSymbol::create); break;
        case 'n': m.symbols.push_back(fermicert::MonomialSymbol::number); break;
        default: return fail(FC_ERR_DOMAIN, std::string("invalid monomial symbol '") + *p + "'");
      }
    }
    return emit(fermicert::monomial(lattice->sites, m), out);
  });
}

void fc_operator_free(fc_operator* op) { delete op; }

fc_status fc_operator_adjoint(const fc_operator* a, fc_operator** out) {
  FC_REQUIRE(a && out);
  return guarded([&] { return emit(a->op.adjoint(), out); });
}

fc_status fc_operator_sum(const fc_operator* a, const fc_operator* b, fc_operator** out) {
  FC_REQUIRE(a && b && out);
  return guarded([&] { return emit(a->op + b->op, out); });
}

fc_status fc_operator_product(const fc_operator* a, const fc_operator* b, fc_operator** out) {
  FC_REQUIRE(a && b && out);
  return guarded([&] { return emit(a->op * b->op, out); });
}

fc_status fc_operator_commutator(const fc_operator* a, const fc_operator* b, fc_operator** out) {
  FC_REQUIRE(a && b && out);
  return guarded([&] { return emit(fermicert::commutator(a->op, b->op), out); });
}

fc_status fc_operator_anticommutator(const fc_operator* a, const fc_operator* b,
                                     fc_operator** out) {
  FC_REQUIRE(a && b && out);
  return guarded([&] { return emit(fermicert::anticommutator(a->op, b->op), out); });
}

fc_status fc_operator_norm(const fc_operator* a, double* out) {
  FC_REQUIRE(a && out);
  return guarded([&] {
    *out = fermicert::op_norm(a->op);
    return FC_OK;
  });
}

fc_status fc_operator_parity(const fc_operator* a, fc_parity* out) {
  FC_REQUIRE(a && out);
  switch (a->op.parity()) {
    case fermicert::Parity::even: *out = FC_PARITY_EVEN; break;
    case fermicert::Parity::odd: *out = FC_PARITY_ODD; break;
    default: *out = FC_PARITY_MIXED; break;
  }
  return FC_OK;
}

fc_status fc_operator_dimension(const fc_operator* a, size_t* out) {
  FC_REQUIRE(a && out);
  *out = a->op.dimension();
  return FC_OK;
}

fc_status fc_operator_entry(const fc_operator* a, size_t row, size_t col, double* re, double* im) {
  FC_REQUIRE(a && re && im);
  if (row >= a->op.dimension() || col >= a->op.dimension()) {
    return fail(FC_ERR_DOMAIN, "matrix index out of range");
  }
  const auto v = a->op.matrix()(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  *re = v.real();
  *im = v.imag();
  return FC_OK;
}

fc_status fc_operator_cond_exp(const fc_operator* a, uint64_t region, fc_operator** out) {
  FC_REQUIRE(a && out);
  return guarded([&] { return emit(fermicert::cond_exp_E(a->op, region), out); });
}

fc_status fc_validate_config(const char* config_json, char** diagnostics_json) {
  FC_REQUIRE(config_json && diagnostics_json);
  return guarded([&] {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& d : fermicert::validate_config_text(config_json)) {
      out.push_back({{"field", d.field}, {"message", d.message}});
    }
    *diagnostics_json = copy_string(out.dump());
    return FC_OK;
  });
}

fc_status fc_run_config(const char* config_json, const char* out_dir,
                        const fc_run_options* options, int* exit_code, char** summary_json) {
  FC_REQUIRE(config_json && out_dir && exit_code && summary_json);
  return guarded([&] {
    fermicert::Overrides o;
    if (options) {
      if (options->has_seed) o.seed = options->seed;
      if (options->has_grid) o.grid = options->grid;
      if (options->has_tol) o.tol = options->tol;
    }
    const auto rr = fermicert::run_config_text(config_json, out_dir, o);
    *exit_code = rr.exit_code;
    *summary_json = copy_string(fermicert::dump_json(rr.summary));
    return FC_OK;
  });
}

}  // extern "C"

/* Copyright 2026 The fermicert Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the fermicert shared library.
 *
 * Every function returns an fc_status. On failure a human-readable message
 * is available from fc_last_error() on the calling thread. Strings returned
 * through char** out-parameters are owned by the caller and released with
 * fc_string_free(). Handles are released with the matching *_free function.
 */
#ifndef FERMICERT_FERMICERT_H_
#define FERMICERT_FERMICERT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(FERMICERT_BUILDING_LIBRARY)
#define FC_API __attribute__((visibility("default")))
#else
#define FC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fc_status {
  FC_OK = 0,
  FC_ERR_SITE_NOT_IN_LATTICE = 1,
  FC_ERR_DOMAIN = 2,
  FC_ERR_DIMENSION_MISMATCH = 3,
  FC_ERR_PARITY = 4,
  FC_ERR_PRECONDITION = 5,
  FC_ERR_CERTIFICATION_FAILED = 6,
  FC_ERR_AMBIGUOUS_KERNEL = 7,
  FC_ERR_GAP_CLOSURE = 8,
  FC_ERR_SIZE_LIMIT = 9,
  FC_ERR_NOT_HERMITIAN = 10,
  FC_ERR_NESTING = 11,
  FC_ERR_CONFIG = 12,
  FC_ERR_INVALID_ARGUMENT = 98,
  FC_ERR_INTERNAL = 99
} fc_status;

typedef enum fc_parity { FC_PARITY_EVEN = 0, FC_PARITY_ODD = 1, FC_PARITY_MIXED = 2 } fc_parity;

typedef struct fc_lattice fc_lattice;
typedef struct fc_operator fc_operator;

/* Overrides for fc_run_config. A field is ignored when its has_* flag is 0. */
typedef struct fc_run_options {
  int has_seed;
  uint64_t seed;
  int has_grid;
  int grid;
  int has_tol;
  double tol;
} fc_run_options;

FC_API const char* fc_version(void);
/* Message of the last failure on this thread; empty after success. */
FC_API const char* fc_last_error(void);
FC_API const char* fc_status_name(fc_status status);
FC_API void fc_string_free(char* s);

/* Worker threads used by parallel kernels (default: FERMICERT_THREADS or 1). */
FC_API fc_status fc_set_threads(int threads);

/* ---- lattices ---------------------------------------------------------- */
FC_API fc_status fc_lattice_chain(size_t sites, fc_lattice** out);
FC_API void fc_lattice_free(fc_lattice* lattice);
FC_API fc_status fc_lattice_size(const fc_lattice* lattice, size_t* out);

/* ---- operators --------------------------------------------------------- */
FC_API fc_status fc_operator_annihilator(const fc_lattice* lattice, size_t site, fc_operator** out);
FC_API fc_status fc_operator_creator(const fc_lattice* lattice, size_t site, fc_operator** out);
FC_API fc_status fc_operator_number(const fc_lattice* lattice, uint64_t region, fc_operator** out);
/* One symbol per site over {I,a,c,n}. */
FC_API fc_status fc_operator_monomial(const fc_lattice* lattice, const char* label, fc_operator** out);
FC_API void fc_operator_free(fc_operator* op);

FC_API fc_status fc_operator_adjoint(const fc_operator* a, fc_operator** out);
FC_API fc_status fc_operator_sum(const fc_operator* a, const fc_operator* b, fc_operator** out);
FC_API fc_status fc_operator_product(const fc_operator* a, const fc_operator* b, fc_operator** out);
FC_API fc_status fc_operator_commutator(const fc_operator* a, const fc_operator* b, fc_operator** out);
FC_API fc_status fc_operator_anticommutator(const fc_operator* a, const fc_operator* b,
                                            fc_operator** out);
FC_API fc_status fc_operator_norm(const fc_operator* a, double* out);
FC_API fc_status fc_operator_parity(const fc_operator* a, fc_parity* out);
FC_API fc_status fc_operator_dimension(const fc_operator* a, size_t* out);
/* Entry (row, col) of the Fock-space matrix. */
FC_API fc_status fc_operator_entry(const fc_operator* a, size_t row, size_t col, double* re,
                                   double* im);
/* Conditional expectation onto the sites in region (bitmask). */
FC_API fc_status fc_operator_cond_exp(const fc_operator* a, uint64_t region, fc_operator** out);

/* ---- configuration-driven runs ------------------------------------------ */
/* diagnostics_json receives a JSON array of {field, message}; empty when valid. */
FC_API fc_status fc_validate_config(const char* config_json, char** diagnostics_json);
/* Runs the configured task, writing reports into out_dir. exit_code receives
 * 0 (success), 2 (certification failure) or 1 (usage or config error);
 * summary_json receives the report or the error object. options may be NULL. */
FC_API fc_status fc_run_config(const char* config_json, const char* out_dir,
                               const fc_run_options* options, int* exit_code,
                               char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* FERMICERT_FERMICERT_H_ */

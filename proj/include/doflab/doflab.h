/*
 * doflab — degrees-of-freedom region calculator and deterministic-model
 * entropy verification lab for the two-user MIMO broadcast channel with
 * partial CSIT.
 *
 * C interface to the shared library. All functions return a status code;
 * outputs are heap-allocated strings released with doflab_string_free, or
 * opaque report handles released with doflab_report_free. On error,
 * doflab_last_error() returns a thread-local message.
 *
 * Rational parameters are passed and returned as exact "p/q" strings
 * (decimals with at most six fractional digits are also accepted).
 */
#ifndef DOFLAB_H
#define DOFLAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum doflab_status {
    DOFLAB_OK = 0,
    DOFLAB_EINVAL = 1,   /* bad arguments or configuration */
    DOFLAB_EBUDGET = 2,  /* enumeration budget exceeded */
    DOFLAB_ERUNTIME = 3  /* internal failure */
} doflab_status;

const char* doflab_version(void);

/* Thread-local message for the most recent failure in this thread. */
const char* doflab_last_error(void);

void doflab_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Region computation                                                  */
/* ------------------------------------------------------------------ */

/* Effective CSIT exponent of the binding sum constraint, as "p/q". */
doflab_status doflab_beta_o(int M, int N1, int N2, const char* beta1, const char* beta2,
                            char** out);

/* Full region description (halfspaces, vertices, beta_o, sum_dof). */
doflab_status doflab_region_json(int M, int N1, int N2, const char* beta1,
                                 const char* beta2, char** out);

/* Vertex list as CSV plot data. */
doflab_status doflab_region_csv(int M, int N1, int N2, const char* beta1,
                                const char* beta2, char** out);

/* Sum-DoF sweep over an explicit beta grid. beta1_list/beta2_list are
 * comma-separated rationals; the product grid is emitted as CSV rows
 * (beta1, beta2, sum_dof, branch agreement on the boundary, vertices). */
doflab_status doflab_sweep_csv(int M, int N1, int N2, const char* beta1_list,
                               const char* beta2_list, char** out);

/* ------------------------------------------------------------------ */
/* Partition arithmetic                                                */
/* ------------------------------------------------------------------ */

/* floor(sqrt(P^lambda)) with exact integer arithmetic; P and lambda are
 * rational strings, the result an integer string. */
doflab_status doflab_pbar(const char* P, const char* lambda, char** out);

/* ------------------------------------------------------------------ */
/* Verification suites                                                 */
/* ------------------------------------------------------------------ */

typedef struct doflab_report doflab_report;

/* Runs one verification suite. Suites: "lemma1", "lemma2", "lemma3",
 * "lemma4", "lemma5", "sumset", "ais", "toy". config_json carries the
 * instance and budget overrides (see the fixtures for schemas). */
doflab_status doflab_verify_run(const char* suite, const char* config_json,
                                uint64_t seed, int threads, doflab_report** out);

/* 0 = PASS, 1 = FAIL, 3 = INCONCLUSIVE. */
int doflab_report_verdict(const doflab_report* rep);

/* Borrowed pointers, valid until doflab_report_free. */
const char* doflab_report_json(const doflab_report* rep);
const char* doflab_report_csv(const doflab_report* rep);

void doflab_report_free(doflab_report* rep);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DOFLAB_H */

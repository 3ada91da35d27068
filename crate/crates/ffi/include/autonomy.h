/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef AUTONOMY_H
#define AUTONOMY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AutonomyStatus {
  AUTONOMY_STATUS_OK = 0,
  AUTONOMY_STATUS_NULL_ARGUMENT = 1,
  AUTONOMY_STATUS_INVALID_UTF8 = 2,
  AUTONOMY_STATUS_PARSE_ERROR = 3,
  AUTONOMY_STATUS_DOMAIN_ERROR = 4,
  AUTONOMY_STATUS_PANIC = 5,
} AutonomyStatus;

typedef enum AutonomyVerdictKind {
  AUTONOMY_VERDICT_KIND_FULLY_PAID = 0,
  AUTONOMY_VERDICT_KIND_DECISION_UPHELD = 1,
  AUTONOMY_VERDICT_KIND_DECISION_NULLIFIED_RECALCULATED = 2,
} AutonomyVerdictKind;

// A validated tax case.
typedef struct AutonomyCase AutonomyCase;

// A 12-entry permission matrix.
typedef struct AutonomyConstitution AutonomyConstitution;

// A solved rights/duties model.
typedef struct AutonomyEquilibrium AutonomyEquilibrium;

// The records of one court session.
typedef struct AutonomyTrace AutonomyTrace;

// Amounts are in micro-units (10^-6 UAH) and are zero unless the kind is
// `DecisionNullifiedRecalculated`.
typedef struct AutonomyVerdict {
  enum AutonomyVerdictKind kind;
  int64_t correct_debt_micros;
  int64_t allowed_penalty_micros;
} AutonomyVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static version string, e.g. `0.1.0`. Do not free.
const char *autonomy_version(void);

// Copy of the last error message on this thread, or NULL if the last call
// succeeded. Free with [`autonomy_string_free`].
char *autonomy_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void autonomy_string_free(char *s);

// Builds the tax model from decimal strings (evasion total in UAH, tax and
// penalty rates) and solves it.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum AutonomyStatus autonomy_equilibrium_new(const char *evasion_total,
                                             const char *tax_rate,
                                             const char *penalty_rate,
                                             struct AutonomyEquilibrium **out);

// # Safety
// `h` must be NULL or a handle from [`autonomy_equilibrium_new`] not yet freed.
void autonomy_equilibrium_free(struct AutonomyEquilibrium *h);

// Equilibrium income rounded to `digits` decimals, or as an exact fraction
// `a/b` when `exact` is true.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum AutonomyStatus autonomy_equilibrium_income(const struct AutonomyEquilibrium *h,
                                                uint32_t digits,
                                                bool exact,
                                                char **out);

// Equilibrium responsibility, formatted as for [`autonomy_equilibrium_income`].
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum AutonomyStatus autonomy_equilibrium_responsibility(const struct AutonomyEquilibrium *h,
                                                        uint32_t digits,
                                                        bool exact,
                                                        char **out);

// SVG diagram with the default window.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum AutonomyStatus autonomy_equilibrium_svg(const struct AutonomyEquilibrium *h, char **out);

// 80x24 character diagram with legend.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum AutonomyStatus autonomy_equilibrium_ascii(const struct AutonomyEquilibrium *h, char **out);

// Validates a case from decimal strings with at most two decimals.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum AutonomyStatus autonomy_case_new(const char *plaintiff,
                                      const char *tax_base,
                                      const char *tax_paid,
                                      const char *assessed_debt,
                                      const char *assessed_penalty,
                                      struct AutonomyCase **out);

// # Safety
// `h` must be NULL or a handle from [`autonomy_case_new`] not yet freed.
void autonomy_case_free(struct AutonomyCase *h);

// Adjudicates under the default rules (18% tax, 20% penalty, 0.01 tolerance),
// writing the verdict and, if `judgment` is not NULL, the judgment text.
//
// # Safety
// `h` must be a live handle; `verdict` must be writable; `judgment` must be
// NULL or writable.
enum AutonomyStatus autonomy_case_adjudicate(const struct AutonomyCase *h,
                                             struct AutonomyVerdict *verdict,
                                             char **judgment);

// Adjudicates a whole case file (JSON Lines); judgments are separated by
// blank lines. Nothing is written on a parse error.
//
// # Safety
// `case_file` must be NUL-terminated; `out` must be writable.
enum AutonomyStatus autonomy_adjudicate_file(const char *case_file, char **out);

// The bundled OS constitution.
//
// # Safety
// `out` must be writable.
enum AutonomyStatus autonomy_constitution_default(struct AutonomyConstitution **out);

// Parses constitution rule lines; unruled request types are denied.
//
// # Safety
// `source` must be NUL-terminated; `out` must be writable.
enum AutonomyStatus autonomy_constitution_parse(const char *source,
                                                struct AutonomyConstitution **out);

// Whether request type `index` (0..12, canonical order) is allowed.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum AutonomyStatus autonomy_constitution_allows(const struct AutonomyConstitution *h,
                                                 uint32_t index,
                                                 bool *out);

// # Safety
// `h` must be NULL or a constitution handle not yet freed.
void autonomy_constitution_free(struct AutonomyConstitution *h);

// Seeded session of `n_cases` random requests.
//
// # Safety
// `constitution` must be a live handle; `out` must be writable.
enum AutonomyStatus autonomy_court_simulate(const struct AutonomyConstitution *constitution,
                                            uint64_t seed,
                                            size_t n_cases,
                                            struct AutonomyTrace **out);

// Replays `n_cases` request indices from `knowledge` (12 entries, true =
// believed allowed).
//
// # Safety
// `knowledge` must point to 12 readable bools and `cases` to `n_cases`
// readable indices; `out` must be writable.
enum AutonomyStatus autonomy_court_replay(const struct AutonomyConstitution *constitution,
                                          const bool *knowledge,
                                          const uint32_t *cases,
                                          size_t n_cases,
                                          struct AutonomyTrace **out);

// Number of records; 0 for NULL.
//
// # Safety
// `h` must be NULL or a live trace handle.
size_t autonomy_trace_len(const struct AutonomyTrace *h);

// Number of records where the lawyer was wrong; 0 for NULL.
//
// # Safety
// `h` must be NULL or a live trace handle.
size_t autonomy_trace_wrong_count(const struct AutonomyTrace *h);

// Human-readable log, one judgment per line.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum AutonomyStatus autonomy_trace_log(const struct AutonomyTrace *h, char **out);

// Structured JSON Lines export.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum AutonomyStatus autonomy_trace_export(const struct AutonomyTrace *h, char **out);

// Final autonomy estimation, e.g. `83%`.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum AutonomyStatus autonomy_trace_autonomy(const struct AutonomyTrace *h, char **out);

// # Safety
// `h` must be NULL or a trace handle not yet freed.
void autonomy_trace_free(struct AutonomyTrace *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AUTONOMY_H */

#ifndef STRONGMECH_H
#define STRONGMECH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_POINTER = 1,
  SM_STATUS_DOMAIN = 2,
  SM_STATUS_VALIDATION = 3,
  SM_STATUS_UNBOUNDED_DOMAIN = 4,
  SM_STATUS_UNBOUNDED_SCORE = 5,
  SM_STATUS_TRIVIAL_RULE = 6,
  SM_STATUS_FEASIBILITY = 7,
  SM_STATUS_BUDGET = 8,
  SM_STATUS_INVALID_UTF8 = 9,
  SM_STATUS_PANIC = 10,
} SmStatus;

typedef enum SmRuleKind {
  SM_RULE_KIND_QUADRATIC = 0,
  SM_RULE_KIND_SPHERICAL = 1,
  SM_RULE_KIND_LOGARITHMIC = 2,
} SmRuleKind;

/**
 * Opaque single-agent mechanism.
 */
typedef struct SmMechanism SmMechanism;

/**
 * Opaque validated scenario.
 */
typedef struct SmScenario SmScenario;

/**
 * Opaque scoring rule.
 */
typedef struct SmScoringRule SmScoringRule;

typedef struct SmEvaluation {
  double allocation;
  double payment;
  double utility;
} SmEvaluation;

typedef struct SmModulus {
  double m;
  double value;
  double report;
} SmModulus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next `sm_*` call on the same thread.
 */
const char *sm_last_error_message(void);

/**
 * Linear mechanism on `[low, high]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SmStatus sm_mechanism_linear(double low, double high, struct SmMechanism **out);

/**
 * Log-family mechanism of order `k` on `[low, high]`; `high` may be infinite.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SmStatus sm_mechanism_log(uint32_t k, double low, double high, struct SmMechanism **out);

/**
 * # Safety
 * `mech` must come from an `sm_mechanism_*` constructor, or be NULL.
 */
void sm_mechanism_free(struct SmMechanism *mech);

/**
 * # Safety
 * `mech` must be live; `out` valid for writes.
 */
enum SmStatus sm_mechanism_evaluate(const struct SmMechanism *mech,
                                    double v,
                                    struct SmEvaluation *out);

/**
 * Utility `value * a(report) - p(report)`.
 *
 * # Safety
 * `mech` must be live; `out` valid for writes.
 */
enum SmStatus sm_mechanism_misreport_utility(const struct SmMechanism *mech,
                                             double value,
                                             double report,
                                             double *out);

/**
 * Grid strong-truthfulness modulus with its witness pair.
 *
 * # Safety
 * `mech` must be live; `out` valid for writes.
 */
enum SmStatus sm_mechanism_modulus(const struct SmMechanism *mech,
                                   double grid_step,
                                   struct SmModulus *out);

/**
 * Standard scoring rule over `n + 1` outcomes.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SmStatus sm_rule_standard(enum SmRuleKind kind, size_t n, struct SmScoringRule **out);

/**
 * # Safety
 * `rule` must come from `sm_rule_standard`, or be NULL.
 */
void sm_rule_free(struct SmScoringRule *rule);

/**
 * `(C0, C)` on a simplex grid.
 *
 * # Safety
 * `rule` must be live; `c0` and `c` valid for writes.
 */
enum SmStatus sm_rule_bounding_constants(const struct SmScoringRule *rule,
                                         double grid_step,
                                         double *c0,
                                         double *c);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum SmStatus sm_eta_bound(size_t n, double delta, double gamma, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum SmStatus sm_gamma_threshold(size_t n, double delta, double epsilon, double *out);

/**
 * Parses and validates a scenario document (JSON).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` valid for writes.
 */
enum SmStatus sm_scenario_from_json(const char *json, struct SmScenario **out);

/**
 * # Safety
 * `scenario` must come from `sm_scenario_from_json`, or be NULL.
 */
void sm_scenario_free(struct SmScenario *scenario);

/**
 * Runs the predicate check. `report_json` receives a string to release
 * with `sm_string_free`; `pass` receives the verdict.
 *
 * # Safety
 * `scenario` must be live; `report_json` and `pass` valid for writes.
 */
enum SmStatus sm_scenario_verify(const struct SmScenario *scenario, char **report_json, bool *pass);

/**
 * # Safety
 * `s` must come from this library, or be NULL.
 */
void sm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRONGMECH_H */

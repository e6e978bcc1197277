/* C interface to the DOB simulation and tau-design toolkit.
 *
 * All functions are thread-compatible: distinct scenario handles may be
 * used from distinct threads; a single handle must not be shared without
 * external synchronization. Strings returned through out-parameters are
 * heap-allocated and must be released with dobkit_string_free().
 */
#ifndef DOBKIT_H
#define DOBKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dobkit_status {
    DOBKIT_OK = 0,
    DOBKIT_ERR_CONFIG = 1,     /* invalid scenario or arguments */
    DOBKIT_ERR_DIVERGED = 2,   /* simulation left the admissible state region */
    DOBKIT_ERR_INFEASIBLE = 3, /* design targets unattainable at this noise level */
    DOBKIT_ERR_GUARANTEE = 4,  /* a verification probe violated the targets */
    DOBKIT_ERR_NUMERIC = 5,    /* numerical kernel failure */
    DOBKIT_ERR_IO = 6          /* file I/O failure */
} dobkit_status;

typedef struct dobkit_scenario dobkit_scenario;

const char* dobkit_version(void);

/* Loads and validates a scenario document. On failure returns a status and
 * writes a message (with the JSON pointer of the offending field) into err. */
dobkit_status dobkit_scenario_load_file(const char* path, dobkit_scenario** out, char* err,
                                        size_t err_len);
dobkit_status dobkit_scenario_load_json(const char* text, dobkit_scenario** out, char* err,
                                        size_t err_len);
void dobkit_scenario_free(dobkit_scenario* scn);

/* Post-load overrides. */
void dobkit_scenario_set_seed(dobkit_scenario* scn, uint64_t seed);
dobkit_status dobkit_scenario_set_settle_eig(dobkit_scenario* scn, char which /* 's' or 'f' */);

/* Simulates the closed loop; writes the trajectory CSV when csv_path is
 * non-NULL and returns the report JSON. A diverged run still writes the
 * partial trajectory and report. */
dobkit_status dobkit_simulate(dobkit_scenario* scn, const char* csv_path, char** report_json,
                              char* err, size_t err_len);

/* Runs the tau-design procedure. The result JSON is produced for both
 * feasible (OK) and infeasible (DOBKIT_ERR_INFEASIBLE) outcomes. */
dobkit_status dobkit_design(dobkit_scenario* scn, char** result_json, char* err, size_t err_len);

/* Simulates a log-spaced tau grid; writes the sweep CSV when csv_path is
 * non-NULL and returns the table JSON. */
dobkit_status dobkit_sweep(dobkit_scenario* scn, double tau_min, double tau_max, int points,
                           const char* csv_path, char** table_json, char* err, size_t err_len);

/* Design followed by probe simulations and the transform cross-check. */
dobkit_status dobkit_verify(dobkit_scenario* scn, int probes, char** verdict_json, char* err,
                            size_t err_len);

void dobkit_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DOBKIT_H */

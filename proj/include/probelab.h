/* C interface to the probing workbench. All structured data crosses the
 * boundary as JSON strings; handles are opaque. Returned strings are owned
 * by the caller and released with pl_string_free. */
#ifndef PROBELAB_H
#define PROBELAB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pl_status {
	PL_OK = 0,
	PL_ERR_ASSERT = 1,  /* a verification assertion failed */
	PL_ERR_INPUT = 2,   /* malformed input */
	PL_ERR_CAP = 3,     /* configured enumeration cap exceeded */
	PL_ERR_INTERNAL = 4
} pl_status;

typedef struct pl_instance pl_instance;
typedef struct pl_tree pl_tree;
typedef struct pl_norm pl_norm;

/* thread-local message for the most recent failure */
const char *pl_last_error(void);
void pl_string_free(char *s);

/* enumeration caps, "name=value,..." with names
 * enum_len, path_len, cap_n, seq_count */
pl_status pl_set_caps(const char *spec);

pl_status pl_instance_parse(const char *json, pl_instance **out);
pl_status pl_instance_to_json(const pl_instance *inst, char **out);
void pl_instance_free(pl_instance *inst);

pl_status pl_tree_parse(const char *json, pl_tree **out);
pl_status pl_tree_to_json(const pl_tree *t, char **out);
void pl_tree_free(pl_tree *t);

pl_status pl_norm_parse(const char *json, pl_norm **out);
pl_status pl_norm_to_json(const pl_norm *f, char **out);
void pl_norm_free(pl_norm *f);

/* structural tree checks; out is a JSON array of violation strings */
pl_status pl_tree_validate(const pl_tree *t, const pl_instance *inst, char **out);

/* evaluation; out is an evaluation-result JSON object */
pl_status pl_adap_exact(const pl_tree *t, const pl_instance *inst,
                        const pl_norm *f, char **out);
pl_status pl_nadp_exact(const pl_tree *t, const pl_instance *inst,
                        const pl_norm *f, int restrict_active, char **out);
pl_status pl_nadp_mc(const pl_tree *t, const pl_instance *inst, const pl_norm *f,
                     long long samples, unsigned long long seed,
                     int restrict_active, char **out);

/* brute-force optima; out carries {value, tree} / {value, sequence} */
pl_status pl_optimal_adaptive(const pl_instance *inst, const pl_norm *f,
                              char **out);
pl_status pl_optimal_nonadaptive(const pl_instance *inst, const pl_norm *f,
                                 char **out);
pl_status pl_gap_report(const pl_instance *inst, const pl_norm *f,
                        int restrict_active, char **out);

/* family generation; spec/out documented in the module JSON formats */
pl_status pl_generate(const char *spec_json, char **out);

/* reductions; request {"op": ..., ...}, see pl_reduce ops in the README */
pl_status pl_reduce(const char *request_json, char **out);

/* labeling runs and label-level checks;
 * request {instance, tree, K, aprime?, action, ...} */
pl_status pl_label_run(const char *request_json, char **out);

/* named verification suite; returns PL_ERR_ASSERT when a check fails.
 * out_pass may be NULL. */
pl_status pl_verify(const char *suite, const char *config_json, char **out,
                    int *out_pass);

/* exploratory reports; request {"kind": "log-bound"|"gap-growth", ...} */
pl_status pl_report(const char *request_json, char **out);

#ifdef __cplusplus
}
#endif

#endif /* PROBELAB_H */

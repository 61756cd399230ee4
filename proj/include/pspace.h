/* C API for the perceptual-space library: opaque handles, integer
 * status codes, and a thread-local error message. All functions return
 * PSPACE_OK on success; on failure pspace_last_error() describes what
 * went wrong and no output parameter is modified. */
#ifndef PSPACE_H
#define PSPACE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PSPACE_API __declspec(dllexport)
#else
#define PSPACE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pspace_status {
    PSPACE_OK = 0,
    PSPACE_ERR_NULL_ARG = 1, /* a required pointer was NULL */
    PSPACE_ERR_RUNTIME = 2   /* anything else; see pspace_last_error() */
} pspace_status;

PSPACE_API const char* pspace_last_error(void);

typedef struct pspace_dataset pspace_dataset;
typedef struct pspace_space pspace_space;
typedef struct pspace_labels pspace_labels;
typedef struct pspace_gold pspace_gold;
typedef struct pspace_result pspace_result;
typedef struct pspace_stream pspace_stream;

/* ---- datasets ---- */

PSPACE_API pspace_status pspace_dataset_load(const char* path, double scale_min, double scale_max,
                                             pspace_dataset** out);
PSPACE_API void pspace_dataset_free(pspace_dataset* ds);
PSPACE_API pspace_status pspace_dataset_counts(const pspace_dataset* ds, int64_t* items,
                                               int64_t* users, int64_t* ratings);
PSPACE_API pspace_status pspace_dataset_split(const pspace_dataset* ds, double fraction,
                                              uint64_t seed, pspace_dataset** train,
                                              pspace_dataset** test);

/* ---- labels and gold samples ---- */

PSPACE_API pspace_status pspace_labels_load(const char* path, const char* attribute,
                                            int regression, pspace_labels** out);
PSPACE_API void pspace_labels_free(pspace_labels* labels);
PSPACE_API pspace_status pspace_labels_count(const pspace_labels* labels, int64_t* positives,
                                             int64_t* negatives);
PSPACE_API pspace_status pspace_gold_load(const char* path, pspace_gold** out);
PSPACE_API pspace_status pspace_gold_sample(const pspace_labels* truth, int n, uint64_t seed,
                                            pspace_gold** out);
PSPACE_API void pspace_gold_free(pspace_gold* gold);

/* ---- factor-model training ---- */

typedef struct pspace_train_config {
    int d;                /* default 100 */
    double lambda;        /* default 0.02 */
    double learning_rate; /* default 0.005 */
    int epochs;           /* default 30 */
    double init_scale;    /* <0 means 0.1/sqrt(d) */
    uint64_t seed;
    int svd_kind; /* 0 = biased euclidean embedding, 1 = svd baseline */
} pspace_train_config;

PSPACE_API void pspace_train_config_default(pspace_train_config* cfg);

typedef struct pspace_train_report {
    double initial_cost;
    double final_cost;
    double holdout_rmse; /* NaN without a holdout */
    double wall_seconds;
} pspace_train_report;

PSPACE_API pspace_status pspace_train(const pspace_dataset* ds, const pspace_train_config* cfg,
                                      const pspace_dataset* holdout, pspace_space** out,
                                      pspace_train_report* report);

/* Max relative error of the analytic gradients against central finite
 * differences; svd_kind as in pspace_train_config. */
PSPACE_API pspace_status pspace_gradient_check(int svd_kind, int d, double lambda, uint64_t seed,
                                               int points, double* max_rel_error);

/* ---- spaces ---- */

PSPACE_API pspace_status pspace_space_save(const pspace_space* space, const char* path);
PSPACE_API pspace_status pspace_space_load(const char* path, pspace_space** out);
PSPACE_API void pspace_space_free(pspace_space* space);
PSPACE_API pspace_status pspace_space_info(const pspace_space* space, int* d, double* mu,
                                           int64_t* n_items, int64_t* n_users);
PSPACE_API pspace_status pspace_space_distance(const pspace_space* space, const char* item_a,
                                               const char* item_b, double* out);
PSPACE_API pspace_status pspace_space_predict(const pspace_space* space, const char* item,
                                              const char* user, double* out);

typedef void (*pspace_neighbor_cb)(const char* item_id, double distance, void* ctx);
PSPACE_API pspace_status pspace_space_neighbors(const pspace_space* space, const char* item_id,
                                                int k, pspace_neighbor_cb cb, void* ctx);

/* LSI metadata space from an item_id<TAB>text file. */
PSPACE_API pspace_status pspace_lsi_build(const char* metadata_path, int k, pspace_space** out);

/* ---- schema expansion ---- */

typedef struct pspace_kernel_config {
    double C;            /* default 1 */
    double gamma;        /* <0 means 1/d */
    double epsilon_tube; /* default 0.1, regression only */
    double tolerance;    /* default 1e-3 */
    int max_iterations;  /* default 200000 */
} pspace_kernel_config;

PSPACE_API void pspace_kernel_config_default(pspace_kernel_config* cfg);

/* cfg == NULL selects hyperparameters by seeded grid-search CV. */
PSPACE_API pspace_status pspace_expand(const pspace_space* space, const pspace_gold* gold,
                                       const pspace_kernel_config* cfg, int folds, uint64_t seed,
                                       pspace_result** out);
PSPACE_API pspace_status pspace_expand_regression(const pspace_space* space,
                                                  const pspace_labels* targets,
                                                  const pspace_kernel_config* cfg, int folds,
                                                  uint64_t seed, pspace_result** out);
PSPACE_API void pspace_result_free(pspace_result* result);
/* item_id<TAB>{1|0}<TAB>margin */
PSPACE_API pspace_status pspace_result_save(const pspace_result* result, const char* path);
PSPACE_API pspace_status pspace_result_gmean(const pspace_result* result,
                                             const pspace_labels* truth, double* out);

/* Writes item_id<TAB>margin for every labeled item whose label
 * contradicts the trained model. */
PSPACE_API pspace_status pspace_detect_noise(const pspace_space* space,
                                             const pspace_labels* labels,
                                             const pspace_kernel_config* cfg, int folds,
                                             uint64_t seed, const char* flags_out_path,
                                             int64_t* flagged_count);

/* Flip `fraction` of the labels (seeded), run noise detection, and
 * score the flags against the flipped set. */
PSPACE_API pspace_status pspace_detect_noise_eval(const pspace_space* space,
                                                  const pspace_labels* labels, double fraction,
                                                  const pspace_kernel_config* cfg, int folds,
                                                  uint64_t seed, double* precision,
                                                  double* recall);

/* ---- evaluation ----
 * metric: "gmean" (v1), "accuracy" (v1), or "pr" (v1=precision,
 * v2=recall of the positive class). */
PSPACE_API pspace_status pspace_eval_files(const char* pred_path, const char* truth_path,
                                           const char* metric, double* v1, double* v2);

/* ---- crowd simulation ---- */

/* preset: "exp1" | "exp2" | "exp3"; exp3 applies its gold filter before
 * returning. */
PSPACE_API pspace_status pspace_simulate_preset(const pspace_labels* truth, const char* preset,
                                                uint64_t seed, pspace_stream** out);
PSPACE_API void pspace_stream_free(pspace_stream* stream);
PSPACE_API pspace_status pspace_stream_save(const pspace_stream* stream, const char* path);
PSPACE_API pspace_status pspace_stream_load(const char* path, pspace_stream** out);

typedef struct pspace_ledger {
    int64_t hits;
    double dollars;
    int64_t judgments;
    double total_minutes;
    int workers_used;
    int workers_excluded;
} pspace_ledger;

PSPACE_API pspace_status pspace_stream_ledger(const pspace_stream* stream, pspace_ledger* out);
PSPACE_API pspace_status pspace_stream_majority_eval(const pspace_stream* stream,
                                                     const pspace_labels* truth,
                                                     int64_t* classified, int64_t* correct,
                                                     double* percent_correct);
/* Majority labels as a labels file (unclassified items omitted). */
PSPACE_API pspace_status pspace_stream_majority_save(const pspace_stream* stream,
                                                     const char* path);

/* Incremental boosting loop; writes the timeline as
 * sim_minutes<TAB>dollars<TAB>train_size<TAB>correct. */
PSPACE_API pspace_status pspace_boost(const pspace_space* space, const pspace_stream* stream,
                                      double interval_minutes, int64_t price_cents_per_hit,
                                      int hit_size, const pspace_labels* truth,
                                      const char* timeline_out_path);

#ifdef __cplusplus
}
#endif

#endif /* PSPACE_H */

/* followerpred — C API for the follower-increase prediction toolkit.
 *
 * Conventions:
 *   - Every function returning int yields FP_OK (0) on success or one of the
 *     FP_E* status codes; fp_last_error() then describes the failure. The
 *     error string is thread-local and valid until the next library call on
 *     the same thread.
 *   - Objects are opaque handles created by fp_*_load/fp_*_train functions
 *     and released with the matching fp_*_free. Freeing NULL is a no-op.
 *   - Strings returned through char** out-parameters are heap-allocated and
 *     owned by the caller; release them with fp_string_free.
 *   - All paths and textual inputs are UTF-8; dates are "YYYY-MM-DD".
 */

#ifndef FOLLOWERPRED_H
#define FOLLOWERPRED_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define FP_OK 0        /* success */
#define FP_EIO 1       /* file missing/unreadable/unwritable */
#define FP_EPARSE 2    /* malformed input file or config */
#define FP_EINVALID 3  /* precondition or argument violation */
#define FP_EINTERNAL 4 /* unexpected internal failure */

/* Library semantic version, e.g. "1.0.0". Static storage; do not free. */
const char* fp_version(void);

/* Last failure message on this thread ("" if none). Do not free. */
const char* fp_last_error(void);

/* Releases strings returned via char** out-parameters. */
void fp_string_free(char* s);

/* 64-bit file fingerprint as lowercase hex, for manifests. */
int fp_file_fingerprint(const char* path, char** out_hex);

/* ---- reference data ---------------------------------------------------- */

typedef struct fp_lexicon fp_lexicon;   /* given-names lexicon */
typedef struct fp_wordlist fp_wordlist; /* lowercase dictionary wordlist */

int fp_lexicon_load(const char* path, fp_lexicon** out);
void fp_lexicon_free(fp_lexicon* lexicon);

int fp_wordlist_load(const char* path, fp_wordlist** out);
void fp_wordlist_free(fp_wordlist* words);

/* ---- snapshots (one crawl) --------------------------------------------- */

typedef struct fp_snapshot fp_snapshot;

/* crawl_date may be NULL to use the file's header date. */
int fp_snapshot_load(const char* path, const char* crawl_date, fp_snapshot** out);
int fp_snapshot_save(const fp_snapshot* snapshot, const char* path);
void fp_snapshot_free(fp_snapshot* snapshot);

/* n = records parsed, malformed = lines skipped at load time. */
int fp_snapshot_counts(const fp_snapshot* snapshot, uint64_t* n, uint64_t* malformed);

/* Copy without protected/verified/stale profiles (the study's filter). */
int fp_snapshot_filter(const fp_snapshot* snapshot, fp_snapshot** out);

/* ---- labeled sets (two crawls joined) ----------------------------------- */

typedef struct fp_labeled fp_labeled;

/* Joins two crawls by user id and derives the increased flag; attrition
 * counts first-crawl users missing from the second. */
int fp_labeled_join(const fp_snapshot* first, const fp_snapshot* second, fp_labeled** out,
                    uint64_t* attrition);
int fp_labeled_load(const char* path, fp_labeled** out);
int fp_labeled_save(const fp_labeled* labeled, const char* path);
void fp_labeled_free(fp_labeled* labeled);

int fp_labeled_counts(const fp_labeled* labeled, uint64_t* n, uint64_t* positives);

/* Seeded stratified split preserving the increased-flag ratio. */
int fp_labeled_split(const fp_labeled* labeled, double train_ratio, uint64_t seed,
                     fp_labeled** train, fp_labeled** eval);

/* ---- reports ------------------------------------------------------------ */
/* as_csv = 0 renders an aligned text table, 1 a full-precision CSV. */

/* Follower-count changes across the two crawls. */
int fp_report_changes(const fp_labeled* labeled, int as_csv, char** out);

/* Descriptive statistics of the interval-level profile measures. */
int fp_report_measures(const fp_labeled* labeled, const fp_lexicon* lexicon,
                       const fp_wordlist* words, int as_csv, char** out);

/* Follower counts described per name-field group. */
int fp_report_group_counts(const fp_labeled* labeled, const fp_lexicon* lexicon,
                           const fp_wordlist* words, int as_csv, char** out);

/* CSV of user_id,group for every record. */
int fp_report_group_assignments(const fp_labeled* labeled, const fp_lexicon* lexicon,
                                const fp_wordlist* words, char** out_csv);

/* One-way ANOVA of follower counts across the three groups. */
int fp_report_anova(const fp_labeled* labeled, const fp_lexicon* lexicon,
                    const fp_wordlist* words, int as_csv, char** out);

/* Tukey-Kramer pairwise comparisons backing the ANOVA above. */
int fp_report_tukey(const fp_labeled* labeled, const fp_lexicon* lexicon,
                    const fp_wordlist* words, int as_csv, char** out);

/* Per-group binary logistic regression of the increased flag. group is one
 * of "contains_name"/"contains_words"/"custom_content", or NULL for all
 * three concatenated. */
int fp_report_logreg(const fp_labeled* labeled, const fp_lexicon* lexicon,
                     const fp_wordlist* words, const char* group, int as_csv, char** out);

/* Log-binned histogram CSV of follower counts; which: 0 = first crawl,
 * 1 = second crawl. */
int fp_histogram_followers(const fp_labeled* labeled, int which, int bins, char** out_csv);

/* ---- model selection ----------------------------------------------------- */

/* Cross-validated grid search over the families in the grid config file.
 * scope selects the feature schema and rows: a group id restricts to that
 * group with its schema; "global" uses the core schema on all rows. Any of
 * out_text/out_csv/out_failures_csv may be NULL when not wanted. */
int fp_gridsearch(const fp_labeled* labeled, const fp_lexicon* lexicon, const fp_wordlist* words,
                  const char* grid_path, const char* scope, int cv_k, int cv_repeats,
                  uint64_t seed, int threads, char** out_text, char** out_csv,
                  char** out_failures_csv);

/* ---- router -------------------------------------------------------------- */

typedef struct fp_router fp_router;

/* Grid-searches and refits one model per group (plus a core-schema global
 * baseline when with_global is nonzero). */
int fp_router_train(const fp_labeled* train, const fp_lexicon* lexicon, const fp_wordlist* words,
                    const char* grid_path, int cv_k, int cv_repeats, uint64_t seed, int threads,
                    int with_global, fp_router** out);
int fp_router_save(const fp_router* router, const char* path);
/* Refuses routers trained against a different lexicon or wordlist. */
int fp_router_load(const char* path, const fp_lexicon* lexicon, const fp_wordlist* words,
                   fp_router** out);
void fp_router_free(fp_router* router);

/* Per-group selected family/parameters/CV scores. */
int fp_router_summary(const fp_router* router, int as_csv, char** out);

/* Held-out AUC per group and overall, with global and random baselines. */
int fp_router_evaluate(const fp_router* router, const fp_labeled* eval, const fp_lexicon* lexicon,
                       const fp_wordlist* words, int as_csv, char** out);

/* Scores every record of a snapshot; CSV of user_id,group,probability,label
 * (label = probability >= 0.5). */
int fp_router_predict(const fp_router* router, const fp_snapshot* snapshot,
                      const fp_lexicon* lexicon, const fp_wordlist* words, char** out_csv);

/* ---- synthetic data ------------------------------------------------------ */

/* Generates two snapshot files and a planted-truth CSV from a generator
 * config; deterministic for a fixed config regardless of threads. */
int fp_synth_generate(const char* config_path, const fp_lexicon* lexicon,
                      const fp_wordlist* words, int threads, const char* first_path,
                      const char* second_path, const char* truth_path, uint64_t* n_first,
                      uint64_t* n_second, uint64_t* n_truth);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FOLLOWERPRED_H */

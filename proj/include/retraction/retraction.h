#ifndef RETRACTION_RETRACTION_H
#define RETRACTION_RETRACTION_H

/*
 * C interface to the retraction toolkit: belief-spread simulation, corpus
 * ingest, record linkage, matched-control outcomes, tier statistics and
 * retraction-window attention.
 *
 * Every fallible call returns rtx_status. On failure, rtx_last_error()
 * returns a message for the calling thread that stays valid until that
 * thread's next failing call. Handles are opaque and released with their
 * matching *_free function (NULL is accepted). Strings returned through
 * char** out-parameters are owned by the caller and released with
 * rtx_string_free; const char* results borrowed from a handle live as long
 * as the handle.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(RTX_BUILDING_LIBRARY)
#define RTX_API __attribute__((visibility("default")))
#else
#define RTX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rtx_status {
  RTX_OK = 0,
  RTX_E_INVALID_ARGUMENT = 1,
  RTX_E_FILE_NOT_FOUND = 2,
  RTX_E_IO = 3,
  RTX_E_SCHEMA_VIOLATION = 4,
  RTX_E_DISCONNECTED_AFTER_RETRIES = 5,
  RTX_E_INVALID_TOPOLOGY_PARAM = 6,
  RTX_E_DEGENERATE_GROUP = 7,
  RTX_E_RANK_DEFICIENT = 8,
  RTX_E_INSUFFICIENT_OBSERVATIONS = 9,
  RTX_E_EMPTY_AFTER_FILTERING = 10,
  RTX_E_MISSING_RETRACTION_DATE = 11,
  RTX_E_YEAR_ORDER_VIOLATION = 12,
  RTX_E_OUT_OF_RANGE_P = 13,
  RTX_E_INVALID_CONFIG = 14,
  RTX_E_INTERNAL = 15
} rtx_status;

RTX_API const char* rtx_version(void);
RTX_API const char* rtx_status_name(rtx_status status);
RTX_API const char* rtx_last_error(void);
RTX_API void rtx_string_free(char* s);

/* Lowercase hex digest into out[65] (NUL-terminated). */
RTX_API rtx_status rtx_sha256_file(const char* path, char out[65]);

/* ---- simulation ------------------------------------------------------ */

typedef enum rtx_topology_kind {
  RTX_TOPOLOGY_COMPLETE = 0,
  RTX_TOPOLOGY_RING = 1,
  RTX_TOPOLOGY_ERDOS_RENYI = 2
} rtx_topology_kind;

typedef struct rtx_sim_params {
  int n_agents;
  int topology; /* rtx_topology_kind */
  int ring_k;
  double edge_prob;
  int share_window;
  int retraction_delay;
  int max_steps;
  int n_replicates;
  uint64_t rng_seed;
  double transmission_prob;
} rtx_sim_params;

RTX_API void rtx_sim_params_default(rtx_sim_params* params);
/* "complete", "ring:K", "erdos-renyi:P" or "er:P". */
RTX_API rtx_status rtx_sim_params_set_topology(rtx_sim_params* params, const char* spec);

/* Single run, replicate 0 of a one-delay sweep with the same params.
 * Writes step,neutral,false,retracted after every step when trace_csv is
 * non-NULL. final_counts receives neutral, false, retracted. */
RTX_API rtx_status rtx_simulate(const rtx_sim_params* params, const char* trace_csv,
                                int final_counts[3]);

typedef struct rtx_sweep rtx_sweep;

typedef struct rtx_delay_summary {
  int delay;
  double mean_neutral, sd_neutral;
  double mean_false, sd_false;
  double mean_retracted, sd_retracted;
} rtx_delay_summary;

/* threads = 0 uses every hardware thread; results do not depend on it. */
RTX_API rtx_status rtx_sweep_run(const rtx_sim_params* params, const int* delays, size_t n_delays,
                                 unsigned threads, rtx_sweep** out);
RTX_API size_t rtx_sweep_delay_count(const rtx_sweep* sweep);
RTX_API rtx_status rtx_sweep_summary(const rtx_sweep* sweep, size_t delay_index,
                                     rtx_delay_summary* out);
RTX_API rtx_status rtx_sweep_replicate(const rtx_sweep* sweep, size_t delay_index,
                                       size_t replicate, int counts[3]);
RTX_API rtx_status rtx_sweep_write_replicates_csv(const rtx_sweep* sweep, const char* path);
RTX_API rtx_status rtx_sweep_write_summary_csv(const rtx_sweep* sweep, const char* path);
RTX_API void rtx_sweep_free(rtx_sweep* sweep);

/* ---- corpora and mentions -------------------------------------------- */

typedef struct rtx_corpus rtx_corpus;
typedef struct rtx_mentions rtx_mentions;

/* Format follows the extension (.jsonl/.ndjson/.json = JSON lines, else
 * CSV). Malformed rows are skipped and listed as violations. */
RTX_API rtx_status rtx_corpus_load(const char* path, rtx_corpus** out);
RTX_API size_t rtx_corpus_size(const rtx_corpus* corpus);
RTX_API size_t rtx_corpus_retracted_count(const rtx_corpus* corpus);
RTX_API size_t rtx_corpus_violation_count(const rtx_corpus* corpus);
RTX_API const char* rtx_corpus_violation(const rtx_corpus* corpus, size_t index);
/* Drops bulk-retraction clusters (size > threshold) in place. */
RTX_API rtx_status rtx_corpus_filter_bulk(rtx_corpus* corpus, size_t threshold, size_t* removed);
RTX_API rtx_status rtx_corpus_write_csv(const rtx_corpus* corpus, const char* path);
RTX_API void rtx_corpus_free(rtx_corpus* corpus);

RTX_API rtx_status rtx_mentions_load(const char* path, rtx_mentions** out);
RTX_API size_t rtx_mentions_size(const rtx_mentions* mentions);
RTX_API size_t rtx_mentions_violation_count(const rtx_mentions* mentions);
RTX_API const char* rtx_mentions_violation(const rtx_mentions* mentions, size_t index);
RTX_API void rtx_mentions_free(rtx_mentions* mentions);

/* ---- synthetic corpora ----------------------------------------------- */

typedef struct rtx_synth_config {
  size_t n_retracted;
  size_t n_controls_per_cell;
  double tier_penalties[4]; /* tiers [0,1), [1,9), [9,31), [31,inf) */
  double attention_beta;
  uint64_t rng_seed;
  double post_rate_per_citation;
  size_t decoys_per_cell;
  double missing_control_rate;
  double attention_intercept;
} rtx_synth_config;

RTX_API void rtx_synth_config_default(rtx_synth_config* config);
/* Writes corpus CSV, mentions CSV and the JSON ground-truth manifest. */
RTX_API rtx_status rtx_synth_write(const rtx_synth_config* config, const char* corpus_csv,
                                   const char* mentions_csv, const char* truth_json);

/* ---- linkage --------------------------------------------------------- */

typedef struct rtx_link rtx_link;

typedef struct rtx_link_pair {
  const char* left_id;
  const char* right_id;
  int fuzzy; /* 0 = DOI join, 1 = fuzzy title */
  double similarity;
} rtx_link_pair;

RTX_API rtx_status rtx_link_run(const rtx_corpus* left, const rtx_corpus* right,
                                double sim_threshold, unsigned threads, rtx_link** out);
RTX_API size_t rtx_link_pair_count(const rtx_link* link);
RTX_API rtx_status rtx_link_pair_at(const rtx_link* link, size_t index, rtx_link_pair* out);
RTX_API size_t rtx_link_unmatched_left_count(const rtx_link* link);
RTX_API size_t rtx_link_unmatched_right_count(const rtx_link* link);
RTX_API rtx_status rtx_link_write_pairs_csv(const rtx_link* link, const char* path);
RTX_API rtx_status rtx_link_write_unmatched_csv(const rtx_link* link, const char* left_path,
                                                const char* right_path);
RTX_API void rtx_link_free(rtx_link* link);

RTX_API rtx_status rtx_levenshtein(const char* a, const char* b, size_t* out);
RTX_API rtx_status rtx_normalize_title(const char* title, char** out);
RTX_API rtx_status rtx_title_similarity(const char* a, const char* b, double* out);

/* ---- matching and outcomes ------------------------------------------- */

typedef struct rtx_matching rtx_matching;
typedef struct rtx_outcomes rtx_outcomes;

/* Matches every paper retracted in [first_year, last_year] against the
 * never-retracted papers of the same corpus. */
RTX_API rtx_status rtx_matching_run(const rtx_corpus* corpus, int first_year, int last_year,
                                    unsigned threads, rtx_matching** out);
/* Rebuilds matched sets from a retracted_id,control_id CSV. */
RTX_API rtx_status rtx_matching_load_csv(const rtx_corpus* corpus, const char* path,
                                         rtx_matching** out);
RTX_API size_t rtx_matching_matched_count(const rtx_matching* matching);
RTX_API size_t rtx_matching_unmatched_count(const rtx_matching* matching);
RTX_API rtx_status rtx_matching_write_csv(const rtx_matching* matching, const char* path);
RTX_API rtx_status rtx_matching_write_unmatched_csv(const rtx_matching* matching, const char* path);
RTX_API void rtx_matching_free(rtx_matching* matching);

typedef struct rtx_outcome_options {
  double epsilon;
  int horizon_years;
  /* Explicit tier cut points (ascending, positive). Ignored when
   * n_tier_percentiles > 0, in which case cuts are derived from the
   * pre-retraction citations of the matched papers. NULL/0 = published tiers. */
  const int64_t* tier_boundaries;
  size_t n_tier_boundaries;
  const double* tier_percentiles;
  size_t n_tier_percentiles;
} rtx_outcome_options;

typedef struct rtx_outcome_row {
  const char* retracted_id;
  const char* tier_label;
  size_t tier;
  int64_t pre_citations;
  double outcome1;
  double outcome2;
  size_t n_controls;
} rtx_outcome_row;

typedef struct rtx_tier_summary {
  const char* label;
  size_t n;
  int has_values; /* 0 for empty tiers; the doubles are then NaN */
  double outcome1_mean;
  double outcome2_median;
  double outcome2_mean;
  double outcome2_max;
} rtx_tier_summary;

RTX_API void rtx_outcome_options_default(rtx_outcome_options* options);
RTX_API rtx_status rtx_outcomes_compute(const rtx_matching* matching,
                                        const rtx_outcome_options* options, rtx_outcomes** out);
RTX_API size_t rtx_outcomes_count(const rtx_outcomes* outcomes);
RTX_API rtx_status rtx_outcomes_row(const rtx_outcomes* outcomes, size_t index, rtx_outcome_row* out);
RTX_API size_t rtx_outcomes_tier_count(const rtx_outcomes* outcomes);
RTX_API rtx_status rtx_outcomes_tier_summary(const rtx_outcomes* outcomes, size_t tier,
                                             rtx_tier_summary* out);
RTX_API rtx_status rtx_outcomes_write_csv(const rtx_outcomes* outcomes, const char* path);
RTX_API rtx_status rtx_outcomes_write_tier_summary_csv(const rtx_outcomes* outcomes, const char* path);
RTX_API void rtx_outcomes_free(rtx_outcomes* outcomes);

/* ---- statistics ------------------------------------------------------ */

enum {
  RTX_REPORT_OUTCOME1 = 1u << 0,
  RTX_REPORT_OUTCOME2 = 1u << 1,
  RTX_REPORT_MEAN_TESTS = 1u << 2, /* Welch ANOVA + pairwise Welch t */
  RTX_REPORT_RANK_TESTS = 1u << 3  /* Kruskal-Wallis + Dunn */
};

/* Reads an outcomes CSV, groups it by tier and returns the JSON report. */
RTX_API rtx_status rtx_stats_report(const char* outcomes_csv, unsigned flags, char** json_out);

typedef struct rtx_test_result {
  double statistic;
  double df1;
  double df2; /* NaN unless the reference distribution is F */
  double p_value;
  int warning; /* nonzero when the result carries a warning (e.g. all tied) */
} rtx_test_result;

RTX_API rtx_status rtx_welch_t(const double* a, size_t na, const double* b, size_t nb,
                               rtx_test_result* out);
RTX_API rtx_status rtx_welch_anova(const double* const* groups, const size_t* sizes, size_t k,
                                   rtx_test_result* out);
RTX_API rtx_status rtx_kruskal_wallis(const double* const* groups, const size_t* sizes, size_t k,
                                      rtx_test_result* out);
RTX_API rtx_status rtx_holm_adjust(const double* p, size_t n, double* adjusted);
RTX_API double rtx_normal_cdf(double z);

/* ---- attention ------------------------------------------------------- */

typedef struct rtx_attention rtx_attention;

typedef struct rtx_attention_options {
  int window_first_offset; /* default -6 */
  int window_last_offset;  /* default +5 */
  int include_retraction_month;
  int series_half_width; /* default 6 */
  const int64_t* tier_boundaries; /* NULL = published tiers */
  size_t n_tier_boundaries;
} rtx_attention_options;

typedef struct rtx_coefficient {
  double estimate;
  double std_error;
  double t_value;
  double p_value;
} rtx_coefficient;

RTX_API void rtx_attention_options_default(rtx_attention_options* options);
/* Analyzes every retracted paper in the corpus. A regression that cannot be
 * fitted does not fail the run; see rtx_attention_regression_json. */
RTX_API rtx_status rtx_attention_run(const rtx_corpus* corpus, const rtx_mentions* mentions,
                                     const rtx_attention_options* options, rtx_attention** out);
RTX_API size_t rtx_attention_row_count(const rtx_attention* attention);
RTX_API rtx_status rtx_attention_write_rows_csv(const rtx_attention* attention, const char* path);
RTX_API rtx_status rtx_attention_write_series_csv(const rtx_attention* attention, const char* path);
RTX_API rtx_status rtx_attention_write_tier_csv(const rtx_attention* attention, const char* path);
RTX_API rtx_status rtx_attention_regression_json(const rtx_attention* attention, char** json_out);
/* outcome 0 = window score, 1 = window mentions. */
RTX_API rtx_status rtx_attention_coefficient(const rtx_attention* attention, int outcome,
                                             const char* column, rtx_coefficient* out);
RTX_API void rtx_attention_free(rtx_attention* attention);

#ifdef __cplusplus
}
#endif

#endif /* RETRACTION_RETRACTION_H */

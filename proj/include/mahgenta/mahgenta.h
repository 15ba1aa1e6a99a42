/* C interface to libmahgenta. Every function returns an mhg_status; on
 * failure mhg_last_error() describes the problem (per thread). Strings
 * handed out by the library are released with mhg_string_free. */
#ifndef MAHGENTA_H
#define MAHGENTA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MAHGENTA_BUILDING_LIBRARY)
#    define MHG_API __declspec(dllexport)
#  else
#    define MHG_API __declspec(dllimport)
#  endif
#else
#  define MHG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mhg_status {
  MHG_OK = 0,
  MHG_ERR_ARGUMENT = 1,
  MHG_ERR_DOMAIN = 2,
  MHG_ERR_CAPACITY = 3,
  MHG_ERR_CONVERGENCE = 4,
  MHG_ERR_STEP_SIZE = 5,
  MHG_ERR_PARSE = 6,
  MHG_ERR_IO = 7,
  MHG_ERR_INTERNAL = 8
} mhg_status;

typedef struct mhg_dataset mhg_dataset;
typedef struct mhg_model mhg_model;
typedef struct mhg_dist mhg_dist;

MHG_API const char* mhg_version(void);
MHG_API const char* mhg_last_error(void);
MHG_API const char* mhg_status_name(mhg_status status);
MHG_API void mhg_string_free(char* s);

MHG_API uint64_t mhg_enumeration_cap(void);
MHG_API void mhg_set_enumeration_cap(uint64_t cap);

/* ---- datasets ---------------------------------------------------------- */

/* pad_degenerate != 0 gives single-category columns an unobserved
 * placeholder category instead of failing. */
MHG_API mhg_status mhg_dataset_load_csv(const char* path, int pad_degenerate, mhg_dataset** out);
MHG_API mhg_status mhg_dataset_parse_csv(const char* text, int pad_degenerate, mhg_dataset** out);
MHG_API void mhg_dataset_free(mhg_dataset* ds);
MHG_API size_t mhg_dataset_rows(const mhg_dataset* ds);
MHG_API int mhg_dataset_cols(const mhg_dataset* ds);
/* Writes min(cols, cap) cardinalities. */
MHG_API mhg_status mhg_dataset_cardinalities(const mhg_dataset* ds, int* out, int cap);
/* 1-based column indices. */
MHG_API mhg_status mhg_dataset_select_columns(const mhg_dataset* ds, const int* columns, int n,
                                              mhg_dataset** out);
/* 1-based index of the column called `name`, or 0. */
MHG_API int mhg_dataset_column_index(const mhg_dataset* ds, const char* name);
MHG_API mhg_status mhg_dataset_split(const mhg_dataset* ds, uint64_t seed, mhg_dataset** train,
                                     mhg_dataset** val, mhg_dataset** test);
MHG_API mhg_status mhg_dataset_to_csv(const mhg_dataset* ds, char** out);
MHG_API uint64_t mhg_dataset_hash(const mhg_dataset* ds);

/* ---- distributions ----------------------------------------------------- */

MHG_API mhg_status mhg_dist_from_json(const char* text, mhg_dist** out);
/* Empirical joint distribution of a dataset (needs the full space under the cap). */
MHG_API mhg_status mhg_dist_from_dataset(const mhg_dataset* ds, mhg_dist** out);
MHG_API mhg_status mhg_dist_to_json(const mhg_dist* p, char** out);
MHG_API void mhg_dist_free(mhg_dist* p);
MHG_API mhg_status mhg_dist_kl_uniform(const mhg_dist* p, double* nats);

typedef enum mhg_measure {
  MHG_MEASURE_H = 0,
  MHG_MEASURE_I = 1,
  MHG_MEASURE_J = 2,
  MHG_MEASURE_RI_MARG = 3,
  MHG_MEASURE_RI_COND = 4
} mhg_measure;

/* subset: 1-based members. bits != 0 reports bits, else nats. */
MHG_API mhg_status mhg_info(const mhg_dist* p, const int* subset, int n, mhg_measure measure,
                            int bits, double* out);
/* H, I and J from empirical marginals only; RI measures need the joint. */
MHG_API mhg_status mhg_info_dataset(const mhg_dataset* ds, const int* subset, int n,
                                    mhg_measure measure, int bits, double* out);

/* chain_json NULL builds the greedy chain. The report is JSON. */
MHG_API mhg_status mhg_decompose(const mhg_dist* p, const char* chain_json, int use_ipf,
                                 char** report_json, double* residual);

/* ---- synthetic data ---------------------------------------------------- */

/* complexity: "low", "med" or "high" over [5]^4. */
MHG_API mhg_status mhg_synth_preset(const char* complexity, size_t n, uint64_t seed,
                                    mhg_dist** truth, mhg_dataset** data);
/* Ground truth over explicit cardinalities and a collection file's JSON. */
MHG_API mhg_status mhg_synth_custom(const int* cards, int d, const char* collection_json,
                                    double sigma, size_t n, uint64_t seed, mhg_dist** truth,
                                    mhg_dataset** data);

/* ---- fitting ----------------------------------------------------------- */

typedef enum mhg_error_mode { MHG_ERROR_EXACT_KL = 0, MHG_ERROR_ESTIMATED_NLL = 1 } mhg_error_mode;
typedef enum mhg_precondition {
  MHG_PRECONDITION_NONE = 0,
  MHG_PRECONDITION_CELL_COUNT = 1,
  MHG_PRECONDITION_FISHER = 2
} mhg_precondition;

typedef struct mhg_fit_config {
  double tau;
  int k;
  int epochs;
  double lr;
  int max_order;
  int renormalize;
  mhg_error_mode error_mode;
  mhg_precondition precondition;
  int backtrack;
  int max_rounds;
  int extra_rounds;
  int n_chains;
  int sweeps_per_epoch;
  int ais_chains;
  int ais_temps;
  int ais_sweeps;
  int verbose; /* progress lines on stderr */
} mhg_fit_config;

MHG_API void mhg_fit_config_default(mhg_fit_config* config);

/* history_csv may be NULL. */
MHG_API mhg_status mhg_fit(const mhg_dataset* train, const mhg_dataset* val,
                           const mhg_fit_config* config, uint64_t seed, mhg_model** out,
                           char** history_csv);
/* Fixed collection: every subset with at most `order` members. */
MHG_API mhg_status mhg_fit_order(const mhg_dataset* train, const mhg_dataset* val, int order,
                                 const mhg_fit_config* config, uint64_t seed, mhg_model** out,
                                 char** history_csv);

/* ---- models ------------------------------------------------------------ */

MHG_API mhg_status mhg_model_load(const char* path, mhg_model** out);
MHG_API mhg_status mhg_model_from_json(const char* text, mhg_model** out);
MHG_API mhg_status mhg_model_save(const mhg_model* m, const char* path);
MHG_API mhg_status mhg_model_to_json(const mhg_model* m, char** out);
MHG_API void mhg_model_free(mhg_model* m);
MHG_API mhg_status mhg_model_set_provenance(mhg_model* m, const char* json);
MHG_API int mhg_model_vars(const mhg_model* m);
MHG_API size_t mhg_model_interactions(const mhg_model* m);
/* Interaction list as "{1};{1,2};..." in canonical order. */
MHG_API mhg_status mhg_model_collection(const mhg_model* m, char** out);
/* Zero-parameter model over the given cardinalities. */
MHG_API mhg_status mhg_model_uniform(const int* cards, int d, mhg_model** out);

/* KL(p_emp; q) (exact_kl) or mean NLL under the stored log Z. */
MHG_API mhg_status mhg_model_error(const mhg_model* m, const mhg_dataset* ds, mhg_error_mode mode,
                                   double* out);

typedef struct mhg_ais_options {
  int n_chains;
  int n_temps;
  int sweeps_per_temp;
  int geometric;
} mhg_ais_options;

MHG_API void mhg_ais_options_default(mhg_ais_options* options);

typedef enum mhg_logz_method { MHG_LOGZ_AUTO = 0, MHG_LOGZ_EXACT = 1, MHG_LOGZ_AIS = 2 } mhg_logz_method;

/* Stores the result in the model and returns a JSON description. AUTO is
 * exact under the enumeration cap, AIS above it. */
MHG_API mhg_status mhg_model_logz(mhg_model* m, mhg_logz_method method,
                                  const mhg_ais_options* options, uint64_t seed, double* log_z,
                                  char** json);

MHG_API mhg_status mhg_model_sample(const mhg_model* m, size_t n, int burn_in, int thin,
                                    uint64_t seed, char** csv);

/* Encodes a CSV file with the model's column names and label maps. */
MHG_API mhg_status mhg_model_encode_csv(const mhg_model* m, const char* path, mhg_dataset** out);
/* target: 1-based column. predictions_csv may be NULL. */
MHG_API mhg_status mhg_model_classify(const mhg_model* m, const mhg_dataset* ds, int target,
                                      double* accuracy, char** predictions_csv);
MHG_API mhg_status mhg_model_column_name(const mhg_model* m, int column, char** out);

#ifdef __cplusplus
}
#endif

#endif

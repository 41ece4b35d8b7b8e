/*
 * specfault C API.
 *
 * Every fallible call returns an sf_status; on failure a human-readable
 * message is available from sf_last_error() on the calling thread until the
 * next API call made by that thread. Handles are opaque, owned by the
 * caller, and released with the matching *_destroy function (NULL is a
 * no-op). Handles are immutable after construction except sf_config, so
 * models, corpora and reports may be shared across threads.
 */
#ifndef SPECFAULT_H
#define SPECFAULT_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPECFAULT_BUILDING_LIBRARY)
#define SF_API __attribute__((visibility("default")))
#else
#define SF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define SF_API_VERSION 1u
#define SF_SPECTRUM_BINS 512u
#define SF_FFT_SIZE 1024u

typedef enum sf_status {
    SF_OK = 0,
    SF_ERR_INVALID_ARGUMENT = 1, /* precondition or config value violated */
    SF_ERR_DATA = 2,             /* malformed or insufficient input data */
    SF_ERR_IO = 3,               /* file could not be opened or written */
    SF_ERR_INTERNAL = 4
} sf_status;

typedef enum sf_fault_type { SF_FAULT_NO = 0, SF_FAULT_IF = 1, SF_FAULT_BF = 2, SF_FAULT_OF = 3 } sf_fault_type;

typedef enum sf_feature_kind { SF_FEATURE_2DPCA = 0, SF_FEATURE_PCA = 1, SF_FEATURE_FFT = 2 } sf_feature_kind;

typedef enum sf_raw_format { SF_RAW_FLOAT32_LE = 0, SF_RAW_FLOAT64_LE = 1, SF_RAW_CSV = 2 } sf_raw_format;

typedef enum sf_report_format { SF_REPORT_CSV = 0, SF_REPORT_TEXT = 1 } sf_report_format;

typedef struct sf_signal sf_signal;
typedef struct sf_config sf_config;
typedef struct sf_corpus sf_corpus;
typedef struct sf_model sf_model;
typedef struct sf_report sf_report;

/* fault_size is in inches and ignored (must be 0) for SF_FAULT_NO; load is 0..3. */
typedef struct sf_label {
    sf_fault_type type;
    double fault_size;
    int load;
} sf_label;

typedef struct sf_classification {
    sf_fault_type label;
    size_t index; /* nearest training sample */
    double distance;
} sf_classification;

typedef struct sf_report_row {
    int test_id;
    sf_feature_kind kind;
    size_t n;
    int testing_load;
    double mean_rate_pct;
    double stddev_pct;
    double seconds; /* NaN when timing was not recorded */
} sf_report_row;

SF_API uint32_t sf_api_version(void);
SF_API const char* sf_last_error(void);
SF_API const char* sf_status_string(sf_status status);

/* ---- vibration signals ---- */
SF_API sf_status sf_signal_ingest(const char* path, sf_raw_format format, double sample_rate, sf_label label,
                                  sf_signal** out);
/* Synthesizes with the synth.* parameters of `config` (NULL for defaults). */
SF_API sf_status sf_signal_synthesize(const sf_config* config, sf_label label, double duration_s, uint64_t seed,
                                      sf_signal** out);
SF_API size_t sf_signal_length(const sf_signal* signal);
SF_API double sf_signal_sample_rate(const sf_signal* signal);
SF_API const double* sf_signal_samples(const sf_signal* signal);
SF_API sf_status sf_signal_write(const sf_signal* signal, const char* path, sf_raw_format format);
SF_API void sf_signal_destroy(sf_signal* signal);

/* ---- spectrum images ---- */
/* window: SF_FFT_SIZE samples; magnitudes_out: SF_SPECTRUM_BINS values. */
SF_API sf_status sf_spectrum(const double* window, size_t length, double sample_rate, double* magnitudes_out);
/* magnitudes: SF_SPECTRUM_BINS values; pixels_out: rows*cols bytes, row-major, 0 or 255. */
SF_API sf_status sf_rasterize(const double* magnitudes, size_t rows, size_t cols, uint8_t* pixels_out);
/* Reads a raw float64 spectrum file of exactly SF_SPECTRUM_BINS values. */
SF_API sf_status sf_read_spectrum(const char* path, double* magnitudes_out);
SF_API sf_status sf_write_pgm(const char* path, const uint8_t* pixels, size_t rows, size_t cols);

/* ---- experiment configuration (flat key = value) ---- */
SF_API sf_status sf_config_create(sf_config** out);
SF_API sf_status sf_config_load(const char* path, sf_config** out);
SF_API sf_status sf_config_set(sf_config* config, const char* key, const char* value);
SF_API void sf_config_destroy(sf_config* config);

/* ---- corpora ---- */
/* Builds the corpus of the config's first test (all four loads). */
SF_API sf_status sf_corpus_build(const sf_config* config, sf_corpus** out);
SF_API sf_status sf_corpus_load(const char* manifest, sf_corpus** out);
SF_API sf_status sf_corpus_write(const sf_corpus* corpus, const char* dir, const char* manifest);
SF_API size_t sf_corpus_size(const sf_corpus* corpus);
SF_API sf_status sf_corpus_label(const sf_corpus* corpus, size_t index, sf_label* out);
SF_API void sf_corpus_destroy(sf_corpus* corpus);

/* Decodes `raw_path` to validate it, then appends it to a recordings
 * manifest (created when missing). samples_out may be NULL. */
SF_API sf_status sf_recordings_append(const char* manifest, const char* raw_path, sf_raw_format format,
                                      double sample_rate, sf_label label, size_t* samples_out);

/* ---- models ---- */
/* load < 0 trains on every load; n_per_class == 0 uses every sample,
 * otherwise n per class are drawn without replacement using `seed`.
 * d applies to 2DPCA, contribution to the PCA kinds. */
SF_API sf_status sf_model_train(const sf_corpus* corpus, sf_feature_kind kind, int load, size_t n_per_class,
                                uint64_t seed, size_t d, double contribution, sf_model** out);
SF_API sf_status sf_model_save(const sf_model* model, const char* path);
SF_API sf_status sf_model_load(const char* path, sf_model** out);
SF_API sf_feature_kind sf_model_kind(const sf_model* model);
SF_API size_t sf_model_size(const sf_model* model);
/* d for 2DPCA, retained component count k for the PCA kinds. */
SF_API size_t sf_model_dimension(const sf_model* model);
SF_API sf_status sf_model_classify_sample(const sf_model* model, const sf_corpus* corpus, size_t index,
                                          sf_classification* out);
SF_API sf_status sf_model_classify_pgm(const sf_model* model, const char* pgm_path, sf_classification* out);
SF_API sf_status sf_model_classify_spectrum(const sf_model* model, const double* magnitudes,
                                            sf_classification* out);
SF_API void sf_model_destroy(sf_model* model);

/* ---- experiment suite and reports ---- */
SF_API sf_status sf_experiment_run(const sf_config* config, sf_report** out);
SF_API sf_status sf_report_load_csv(const char* path, sf_report** out);
SF_API sf_status sf_report_write(const sf_report* report, const char* path, sf_report_format format);
/* Writes at most cap bytes (NUL-terminated) and stores the full length,
 * excluding the terminator, in *needed. */
SF_API sf_status sf_report_format_to(const sf_report* report, sf_report_format format, char* buf, size_t cap,
                                     size_t* needed);
SF_API size_t sf_report_row_count(const sf_report* report);
SF_API sf_status sf_report_get_row(const sf_report* report, size_t index, sf_report_row* out);
/* Confusion matrix [true][predicted] summed over repetitions, 16 counts,
 * indexed by sf_fault_type. Zero-filled for reports loaded from CSV. */
SF_API sf_status sf_report_get_confusion(const sf_report* report, size_t index, uint64_t* counts_out);
SF_API void sf_report_destroy(sf_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SPECFAULT_H */

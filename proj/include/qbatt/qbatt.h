/* qbatt.h: C interface to the charger-battery simulation library.
 *
 * Every function returning qbatt_status leaves a description of the last
 * failure for the calling thread in qbatt_last_error(). Handles are opaque and
 * owned by the caller; release each with its _free function.
 */

#ifndef QBATT_H
#define QBATT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(QBATT_BUILDING_LIBRARY)
#define QBATT_API __attribute__((visibility("default")))
#else
#define QBATT_API
#endif

typedef enum qbatt_status {
    QBATT_OK = 0,
    QBATT_ERR_INVALID_ARGUMENT = 1, /* null handle or pointer */
    QBATT_ERR_VALIDATION = 2,       /* bad config value, unknown key or scenario */
    QBATT_ERR_NUMERICAL = 3,        /* a run diagnostic tripped */
    QBATT_ERR_IO = 4,
    QBATT_ERR_INTERNAL = 5
} qbatt_status;

typedef struct qbatt_config qbatt_config;
typedef struct qbatt_series qbatt_series;
typedef struct qbatt_report qbatt_report;

QBATT_API const char* qbatt_version(void);
QBATT_API const char* qbatt_last_error(void);
QBATT_API const char* qbatt_status_name(qbatt_status status);

/* Configuration: flat "key = value" text, '#' comments. */
QBATT_API qbatt_status qbatt_config_new(qbatt_config** out);
QBATT_API qbatt_status qbatt_config_parse(const char* text, qbatt_config** out);
QBATT_API qbatt_status qbatt_config_load(const char* path, qbatt_config** out);
QBATT_API qbatt_status qbatt_config_set(qbatt_config* cfg, const char* key, const char* value);
/* Copies the resolved value of key into buf. QBATT_ERR_INVALID_ARGUMENT if it
   does not fit in len bytes including the terminator. */
QBATT_API qbatt_status qbatt_config_get(const qbatt_config* cfg, const char* key, char* buf, size_t len);
QBATT_API void qbatt_config_free(qbatt_config* cfg);

/* Single runs. Each produces a numeric table. */
QBATT_API qbatt_status qbatt_run_rates(const qbatt_config* cfg, qbatt_series** out);
QBATT_API qbatt_status qbatt_run_evolve(const qbatt_config* cfg, qbatt_series** out);
QBATT_API qbatt_status qbatt_run_nmqj(const qbatt_config* cfg, qbatt_series** out);
/* shots may be NULL; otherwise it receives the per-shot summary table. */
QBATT_API qbatt_status qbatt_run_circuit(const qbatt_config* cfg, qbatt_series** out, qbatt_series** shots);

QBATT_API size_t qbatt_series_rows(const qbatt_series* s);
QBATT_API size_t qbatt_series_cols(const qbatt_series* s);
/* NULL when out of range. */
QBATT_API const char* qbatt_series_column_name(const qbatt_series* s, size_t col);
/* NaN when out of range. */
QBATT_API double qbatt_series_value(const qbatt_series* s, size_t row, size_t col);
QBATT_API size_t qbatt_series_warning_count(const qbatt_series* s);
QBATT_API const char* qbatt_series_warning(const qbatt_series* s, size_t i);
QBATT_API qbatt_status qbatt_series_write_csv(const qbatt_series* s, const char* path);
QBATT_API void qbatt_series_free(qbatt_series* s);

/* Scenarios. names: NULL past the end. */
QBATT_API const char* qbatt_scenario_name(size_t i);
QBATT_API qbatt_status qbatt_run_scenario(const qbatt_config* cfg, const char* name, const char* out_dir,
                                          qbatt_report** out);
QBATT_API size_t qbatt_report_file_count(const qbatt_report* r);
QBATT_API const char* qbatt_report_file(const qbatt_report* r, size_t i);
QBATT_API size_t qbatt_report_warning_count(const qbatt_report* r);
QBATT_API const char* qbatt_report_warning(const qbatt_report* r, size_t i);
QBATT_API void qbatt_report_free(qbatt_report* r);

#ifdef __cplusplus
}
#endif

#endif /* QBATT_H */

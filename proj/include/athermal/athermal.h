#ifndef ATHERMAL_ATHERMAL_H
#define ATHERMAL_ATHERMAL_H

/* C interface: every command takes a JSON configuration and yields an opaque
 * result holding a JSON report, an optional CSV table and a one-line summary. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(ATHERMAL_BUILDING_LIBRARY)
#define ATHERMAL_API __attribute__((visibility("default")))
#else
#define ATHERMAL_API
#endif

typedef enum athermal_status {
    ATHERMAL_OK = 0,
    ATHERMAL_INVALID_PARAMETER = 1,
    ATHERMAL_FREE_TARGET = 2,
    ATHERMAL_UNSUPPORTED_DIMENSION = 3,
    ATHERMAL_UNSUPPORTED_SIZE = 4,
    ATHERMAL_INVALID_SHIFT = 5,
    ATHERMAL_INVALID_FRAME = 6,
    ATHERMAL_INVALID_TARGET = 7,
    ATHERMAL_INFEASIBLE = 8,
    ATHERMAL_AUDIT_FAILURE = 9,
    ATHERMAL_INTERNAL = 10
} athermal_status;

typedef struct athermal_result athermal_result;

/* Commands: rate, distill, form, sweep, simulate, oracle, exhaust, frame,
 * coherent, work, properties. On failure *out is set to NULL. */
ATHERMAL_API athermal_status athermal_run(const char* command, const char* config_json, athermal_result** out);

/* Parses a plan document and serialises it again. */
ATHERMAL_API athermal_status athermal_roundtrip(const char* document_json, athermal_result** out);

ATHERMAL_API const char* athermal_result_json(const athermal_result* result);
ATHERMAL_API const char* athermal_result_csv(const athermal_result* result);
ATHERMAL_API const char* athermal_result_summary(const athermal_result* result);
ATHERMAL_API void athermal_result_free(athermal_result* result);

/* Message of the last failure on the calling thread. */
ATHERMAL_API const char* athermal_last_error(void);
ATHERMAL_API const char* athermal_status_name(athermal_status status);
/* 0 success, 1 internal error, 2 domain error. */
ATHERMAL_API int athermal_exit_code(athermal_status status);
ATHERMAL_API int athermal_schema_version(void);

#ifdef __cplusplus
}
#endif

#endif

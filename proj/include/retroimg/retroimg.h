/* C interface to the retroimg simulator. All handles are opaque; every
 * function returns an rti_status and, on failure, leaves a message that
 * rti_last_error() reports for the calling thread. */
#ifndef RETROIMG_H
#define RETROIMG_H

#include <stddef.h>

#if defined(RTI_BUILDING_LIBRARY)
#define RTI_API __attribute__((visibility("default")))
#else
#define RTI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rti_status {
  RTI_OK = 0,
  RTI_ERR_VALIDATION = 1,
  RTI_ERR_DARK = 2,
  RTI_ERR_VERIFICATION = 3,
  RTI_ERR_IO = 4,
  RTI_ERR_ARGUMENT = 5,
  RTI_ERR_INTERNAL = 6
} rti_status;

typedef struct rti_config rti_config;
typedef struct rti_result rti_result;

RTI_API const char* rti_version(void);

/* Message for the last failed call on this thread; empty when none. */
RTI_API const char* rti_last_error(void);

RTI_API rti_status rti_config_parse(const char* text, rti_config** out);
RTI_API rti_status rti_config_load(const char* path, rti_config** out);
RTI_API void rti_config_free(rti_config* config);
/* Caller frees *out with rti_string_free. */
RTI_API rti_status rti_config_serialize(const rti_config* config, char** out);
RTI_API rti_status rti_config_output_dir(const rti_config* config, const char** out);

RTI_API rti_status rti_run(const rti_config* config, rti_result** out);
RTI_API void rti_result_free(rti_result* result);
/* Number of conditioning positions in the result (1 without a sweep). */
RTI_API size_t rti_result_count(const rti_result* result);
RTI_API size_t rti_result_grid_size(const rti_result* result);
/* Copies grid positions, density and the conditioning position of entry
 * `index`; x2 and density each need rti_result_grid_size() slots. Either
 * array may be NULL. */
RTI_API rti_status rti_result_density(const rti_result* result, size_t index, double* x2,
                                      double* density, double* x1);
/* Writes the CSV (and stages JSON if configured) into `out_dir`, or the
 * config's output.dir when out_dir is NULL. */
RTI_API rti_status rti_result_write(const rti_result* result, const char* out_dir);

/* Runs the oracle-equivalence suite. *report (may be NULL) receives the text
 * report, freed with rti_string_free; *seconds (may be NULL) the run time.
 * Returns RTI_ERR_VERIFICATION when any check fails. */
RTI_API rti_status rti_verify(int fast, char** report, double* seconds);

RTI_API size_t rti_scenario_count(void);
/* Borrowed strings, valid for the lifetime of the library. */
RTI_API rti_status rti_scenario_info(size_t index, const char** name, const char** description,
                                     const char** config_text);

RTI_API void rti_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif

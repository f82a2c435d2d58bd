/*
 * eoct - cavity electro-optic transducer modeling and analysis toolkit.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed here; every fallible call returns an eoct_status and leaves a
 * human-readable message in eoct_last_error() on failure. Frequencies cross
 * this boundary as ordinary frequency in Hz.
 */
#ifndef EOCT_H
#define EOCT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eoct_status {
    EOCT_OK = 0,
    EOCT_E_INPUT = 2,    /* invalid arguments or failed validation */
    EOCT_E_FIT = 3,      /* fit did not converge */
    EOCT_E_INTERNAL = 4, /* internal invariant violation */
    /* fine-grained input errors; exit class 2 */
    EOCT_E_IO = 20,
    EOCT_E_MALFORMED_HEADER = 21,
    EOCT_E_NON_MONOTONE_FREQ = 22,
    EOCT_E_UNIT_MISMATCH = 23,
    EOCT_E_BAD_CONFIG = 24
} eoct_status;

/* Process exit class of a status: 0, 2, 3 or 4. */
int eoct_exit_class(eoct_status st);

const char* eoct_version(void);

/* Message for the most recent failure in the calling thread. */
const char* eoct_last_error(void);

typedef struct eoct_config eoct_config;
typedef struct eoct_trace eoct_trace;
typedef struct eoct_report eoct_report;

/* Scenario configuration (JSON document; see README for the schema). */
eoct_status eoct_config_load(const char* path, eoct_config** out);
void eoct_config_free(eoct_config* cfg);

/* Spectrum traces (plain-text "# key: value" header plus two columns). */
eoct_status eoct_trace_load(const char* path, eoct_trace** out);
eoct_status eoct_trace_save(const eoct_trace* trace, const char* path);
size_t eoct_trace_size(const eoct_trace* trace);
void eoct_trace_free(eoct_trace* trace);

/* Pipeline commands. The returned report must be freed by the caller. */
eoct_status eoct_simulate(const eoct_config* cfg, eoct_report** out);
eoct_status eoct_fit(const eoct_config* cfg, const eoct_trace* const* traces, size_t n_traces,
                     eoct_report** out);
eoct_status eoct_sweep(const eoct_config* cfg, eoct_report** out);

typedef struct eoct_chain_calibration {
    double beta1_db;
    double beta2_db;
    double beta3_db;
    double beta4_db;
    double n_sys;
    double n_add;
    double beta4_ci_db;
    double n_sys_ci;
    int beta1_valid;
    int beta2_valid;
    int beta3_valid;
} eoct_chain_calibration;

/* Radiometric output-line calibration from a matched-load temperature sweep
 * file ("# kind: radiometer", columns T[K] and PSD[W]). */
eoct_status eoct_calibrate(const eoct_config* cfg, const char* radiometer_path,
                           eoct_chain_calibration* out);

/* Reports. write_outputs produces report.json, summary.txt and the
 * plot-data files in out_dir; writes are atomic and deterministic. */
eoct_status eoct_report_load(const char* path, eoct_report** out);
eoct_status eoct_report_save(const eoct_report* report, const char* path);
eoct_status eoct_report_write_outputs(const eoct_report* report, const char* out_dir);
size_t eoct_report_row_count(const eoct_report* report);
size_t eoct_report_warning_count(const eoct_report* report);
void eoct_report_free(eoct_report* report);

/* Scalar evaluators. */
eoct_status eoct_planck_occupation(double freq_hz, double temperature_k, double* out);
eoct_status eoct_eta_total(double eta_e, double eta_o, double lambda_sq, double cooperativity,
                           double* out);
eoct_status eoct_eta_internal(double cooperativity, double* out);
eoct_status eoct_bandwidth_hz(double kappa_o_hz, double kappa_e_hz, double* out);
eoct_status eoct_heating_projection(double rate_ref_per_s, double p_ref_w, double p_pulse_w,
                                    double tau_s, double* out);

#ifdef __cplusplus
}
#endif

#endif /* EOCT_H */

#include "eoct/eoct.h"

#include "config.hpp"
#include "error.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "trace.hpp"
#include "transduction.hpp"
#include "util.hpp"

#include <exception>
#include <string>

namespace {

thread_local std::string g_last_error;

eoct_status to_status(eoct::Errc code)
{
    switch (code) {
        case eoct::Errc::ok: return EOCT_OK;
        case eoct::Errc::invalid_input: return EOCT_E_INPUT;
        case eoct::Errc::fit_failed: return EOCT_E_FIT;
        case eoct::Errc::internal: return EOCT_E_INTERNAL;
        case eoct::Errc::io: return EOCT_E_IO;
        case eoct::Errc::malformed_header: return EOCT_E_MALFORMED_HEADER;
        case eoct::Errc::non_monotone_freq: return EOCT_E_NON_MONOTONE_FREQ;
        case eoct::Errc::unit_mismatch: return EOCT_E_UNIT_MISMATCH;
        case eoct::Errc::bad_config: return EOCT_E_BAD_CONFIG;
    }
    return EOCT_E_INTERNAL;
}

// Run `fn` and translate exceptions into status codes + last-error message.
template <typename Fn>
eoct_status guarded(Fn&& fn)
{
    try {
        fn();
        return EOCT_OK;
    } catch (const eoct::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EOCT_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return EOCT_E_INTERNAL;
    }
}

eoct_status require(bool ok, const char* what)
{
    if (ok) return EOCT_OK;
    g_last_error = what;
    return EOCT_E_INPUT;
}

} // namespace

struct eoct_config {
    eoct::ScenarioConfig cfg;
};

struct eoct_trace {
    eoct::SpectrumTrace trace;
};

struct eoct_report {
    eoct::Report report;
};

extern "C" {

int eoct_exit_class(eoct_status st)
{
    switch (st) {
        case EOCT_OK: return 0;
        case EOCT_E_FIT: return 3;
        case EOCT_E_INTERNAL: return 4;
        default: return 2;
    }
}

const char* eoct_version(void)
{
    return eoct::tool_version();
}

const char* eoct_last_error(void)
{
    return g_last_error.c_str();
}

eoct_status eoct_config_load(const char* path, eoct_config** out)
{
    if (auto st = require(path && out, "eoct_config_load: null argument")) return st;
    return guarded([&] { *out = new eoct_config{eoct::load_config(path)}; });
}

void eoct_config_free(eoct_config* cfg)
{
    delete cfg;
}

eoct_status eoct_trace_load(const char* path, eoct_trace** out)
{
    if (auto st = require(path && out, "eoct_trace_load: null argument")) return st;
    return guarded([&] { *out = new eoct_trace{eoct::load_trace(path)}; });
}

eoct_status eoct_trace_save(const eoct_trace* trace, const char* path)
{
    if (auto st = require(trace && path, "eoct_trace_save: null argument")) return st;
    return guarded([&] { eoct::save_trace(trace->trace, path); });
}

size_t eoct_trace_size(const eoct_trace* trace)
{
    return trace ? trace->trace.freq_hz.size() : 0;
}

void eoct_trace_free(eoct_trace* trace)
{
    delete trace;
}

eoct_status eoct_simulate(const eoct_config* cfg, eoct_report** out)
{
    if (auto st = require(cfg && out, "eoct_simulate: null argument")) return st;
    return guarded([&] { *out = new eoct_report{eoct::run_simulate(cfg->cfg)}; });
}

eoct_status eoct_fit(const eoct_config* cfg, const eoct_trace* const* traces, size_t n_traces,
                     eoct_report** out)
{
    if (auto st = require(cfg && out && (n_traces == 0 || traces), "eoct_fit: null argument"))
        return st;
    return guarded([&] {
        std::vector<eoct::SpectrumTrace> list;
        list.reserve(n_traces);
        for (size_t i = 0; i < n_traces; ++i) {
            if (!traces[i]) eoct::fail(eoct::Errc::invalid_input, "eoct_fit: null trace");
            list.push_back(traces[i]->trace);
        }
        *out = new eoct_report{eoct::run_fit(cfg->cfg, list)};
    });
}

eoct_status eoct_sweep(const eoct_config* cfg, eoct_report** out)
{
    if (auto st = require(cfg && out, "eoct_sweep: null argument")) return st;
    return guarded([&] { *out = new eoct_report{eoct::run_sweep(cfg->cfg)}; });
}

eoct_status eoct_calibrate(const eoct_config* cfg, const char* radiometer_path,
                           eoct_chain_calibration* out)
{
    if (auto st = require(cfg && radiometer_path && out, "eoct_calibrate: null argument"))
        return st;
    return guarded([&] {
        const auto points = eoct::load_radiometer_points(radiometer_path);
        const eoct::ChainCalibration cal = eoct::run_calibrate(cfg->cfg, points);
        out->beta1_db = cal.chain.beta1.db();
        out->beta2_db = cal.chain.beta2.db();
        out->beta3_db = cal.chain.beta3.db();
        out->beta4_db = cal.chain.beta4.db();
        out->n_sys = cal.chain.n_sys;
        out->n_add = cal.n_add;
        out->beta4_ci_db = cal.beta4_ci_db;
        out->n_sys_ci = cal.n_sys_ci;
        out->beta1_valid = cal.beta1_known ? 1 : 0;
        out->beta2_valid = cal.beta2_known ? 1 : 0;
        out->beta3_valid = cal.beta3_known ? 1 : 0;
    });
}

eoct_status eoct_report_load(const char* path, eoct_report** out)
{
    if (auto st = require(path && out, "eoct_report_load: null argument")) return st;
    return guarded([&] {
        *out = new eoct_report{eoct::Report::from_json_text(eoct::read_file(path))};
    });
}

eoct_status eoct_report_save(const eoct_report* report, const char* path)
{
    if (auto st = require(report && path, "eoct_report_save: null argument")) return st;
    return guarded([&] { eoct::atomic_write_file(path, report->report.to_json_text()); });
}

eoct_status eoct_report_write_outputs(const eoct_report* report, const char* out_dir)
{
    if (auto st = require(report && out_dir, "eoct_report_write_outputs: null argument"))
        return st;
    return guarded([&] { eoct::write_report_outputs(report->report, out_dir); });
}

size_t eoct_report_row_count(const eoct_report* report)
{
    return report ? report->report.rows.size() : 0;
}

size_t eoct_report_warning_count(const eoct_report* report)
{
    return report ? report->report.warnings.size() : 0;
}

void eoct_report_free(eoct_report* report)
{
    delete report;
}

eoct_status eoct_planck_occupation(double freq_hz, double temperature_k, double* out)
{
    if (auto st = require(out != nullptr, "eoct_planck_occupation: null output")) return st;
    return guarded([&] { *out = eoct::planck_occupation(freq_hz, temperature_k); });
}

eoct_status eoct_eta_total(double eta_e, double eta_o, double lambda_sq, double cooperativity,
                           double* out)
{
    if (auto st = require(out != nullptr, "eoct_eta_total: null output")) return st;
    return guarded([&] { *out = eoct::eta_total(eta_e, eta_o, lambda_sq, cooperativity); });
}

eoct_status eoct_eta_internal(double cooperativity, double* out)
{
    if (auto st = require(out != nullptr, "eoct_eta_internal: null output")) return st;
    return guarded([&] { *out = eoct::eta_internal(cooperativity); });
}

eoct_status eoct_bandwidth_hz(double kappa_o_hz, double kappa_e_hz, double* out)
{
    if (auto st = require(out != nullptr, "eoct_bandwidth_hz: null output")) return st;
    return guarded([&] {
        *out = eoct::bandwidth(eoct::consts::two_pi * kappa_o_hz,
                               eoct::consts::two_pi * kappa_e_hz) /
               eoct::consts::two_pi;
    });
}

eoct_status eoct_heating_projection(double rate_ref_per_s, double p_ref_w, double p_pulse_w,
                                    double tau_s, double* out)
{
    if (auto st = require(out != nullptr, "eoct_heating_projection: null output")) return st;
    return guarded(
        [&] { *out = eoct::heating_projection(rate_ref_per_s, p_ref_w, p_pulse_w, tau_s); });
}

} // extern "C"

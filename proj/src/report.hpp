#ifndef EOCT_REPORT_HPP
#define EOCT_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

namespace eoct {

// One power point. Absent quantities are NaN and serialize as null; CIs are
// 95% half-widths where a fit produced them.
struct ReportRow {
    double pump_power_w = 0.0;
    double n_p = nan_value();
    double cooperativity = nan_value();
    double eta_tot = nan_value();
    double eta_int = nan_value();
    double bandwidth_hz = nan_value();
    double n_wg = nan_value();
    double n_b = nan_value();
    double n_e = nan_value();
    double n_out = nan_value();
    double eta_tot_ci = nan_value();
    double n_wg_ci = nan_value();
    double n_b_ci = nan_value();
    std::vector<std::string> notes;

    static double nan_value();
};

struct SweepRow {
    double p_p_w = 0.0;
    double g0_hz = 0.0;
    double lambda_sq = 0.0;
    double kappa_e_hz = 0.0;
    double kappa_o_hz = 0.0;
    double n_p = 0.0;
    double cooperativity = 0.0;
    double eta_tot = 0.0;
    double bandwidth_hz = 0.0;
    double heating_photons = ReportRow::nan_value();
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<double> c_unity_power_w; // P where C crosses 1, interpolated
};

struct InputDigest {
    std::string path;
    std::string digest;
};

struct SpectrumRecord {
    double pump_power_w = 0.0;
    std::string label;
    std::vector<double> x_hz;
    std::vector<double> measured;
    std::vector<double> fitted;
};

struct Report {
    std::string tool_version;
    std::string config_hash;
    std::optional<double> sideband_suppression_db; // pass-through metadata
    std::vector<InputDigest> inputs;
    std::vector<ReportRow> rows;
    std::vector<std::string> warnings;
    std::optional<SweepResult> sweep;
    std::vector<SpectrumRecord> spectra;

    std::string to_json_text() const;
    static Report from_json_text(const std::string& text);
};

// Row sanity enforced on emission: eta_tot below the eta_e eta_o Lambda^2
// ceiling when supplied, and N_e inside the bath extrema.
void check_row_invariants(const ReportRow& row, std::optional<double> eta_ceiling);

// Deterministic report bundle: report.json, summary.txt and one plot-data
// file per figure-style output. All writes are atomic.
void write_report_outputs(const Report& report, const std::string& out_dir);

} // namespace eoct

#endif

#ifndef EOCT_CONFIG_HPP
#define EOCT_CONFIG_HPP

#include "device.hpp"
#include "transduction.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eoct {

// Per-power lookup of the total microwave linewidth (pump light degrades the
// superconductor); linearly interpolated, clamped at the table ends.
struct KappaTable {
    std::vector<double> pump_power_w;
    std::vector<double> kappa_e_hz; // total linewidth, ordinary Hz

    double kappa_e_rad_s_at(double p_w) const;
};

// Per-power beta2 override for EDFA gain saturation.
struct Beta2Table {
    std::vector<double> pump_power_w;
    std::vector<double> beta2_db;

    double beta2_db_at(double p_w) const;
};

struct PowerLawModel {
    double prefactor = 0.0; // value at 1 W
    double exponent = 0.0;

    double at(double p_w) const;
};

struct HeatingCfg {
    double rate_ref_per_s = 0.0;
    double p_ref_w = 0.0;
    double tau_s = 0.0;
};

struct CalibrationCfg {
    double omega_e_hz = 0.0;
    double bw_hz = 0.0;
    double extra_loss_db = 0.0;
    std::optional<double> through_level_db; // off-resonance |S_ee|^2 level, dB
    // Power pairs for deducing the optical line factors from a known
    // efficiency: {input power, measured output power, eta_tot}.
    std::optional<double> eta_tot;
    std::optional<double> p_in_o_w, p_out_e_w; // gives beta1
    std::optional<double> p_in_e_w, p_out_o_w; // gives beta2
};

// One sweep axis; names: p_p_w, g0_hz, lambda_sq, kappa_e_hz, kappa_o_hz.
struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct PipelineOptions {
    int baseline_poly_order = 0;       // 0 disables ripple division
    double off_resonance_factor = 20.0; // |delta| >= factor * max(kappa)
    bool emit_spectra = true;
};

struct ScenarioConfig {
    DeviceParams device;
    std::optional<CalibrationChain> chain;
    std::vector<double> power_grid_w;
    std::optional<KappaTable> kappa_e_table;
    std::optional<Beta2Table> beta2_table;
    std::optional<PowerLawModel> n_wg_model;
    std::optional<PowerLawModel> n_b_model;
    std::optional<HeatingCfg> heating;
    std::optional<CalibrationCfg> calibration;
    std::vector<SweepAxis> sweep_axes;
    PipelineOptions options;
    std::optional<double> sideband_suppression_db; // pass-through metadata
    std::string config_hash;                       // digest of the source file
    std::string source_path;

    // Microwave mode with the per-power total linewidth applied (kappa_ex
    // fixed by geometry, kappa_in absorbs the change).
    ResonatorMode mw_at_power(double p_w) const;
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

} // namespace eoct

#endif

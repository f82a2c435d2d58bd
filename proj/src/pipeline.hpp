#ifndef EOCT_PIPELINE_HPP
#define EOCT_PIPELINE_HPP

#include "config.hpp"
#include "fit_models.hpp"
#include "report.hpp"
#include "trace.hpp"

#include <string>
#include <vector>

namespace eoct {

const char* tool_version();

// Forward-model evaluation of one power point (the row shared by simulate
// and sweep).
struct SimPoint {
    double n_p = 0.0;
    double cooperativity = 0.0;
    double eta_tot = 0.0;
    double eta_int = 0.0;
    double bandwidth_hz = 0.0;
    double kappa_e_hz = 0.0;
    double kappa_o_hz = 0.0;
};

SimPoint evaluate_point(const ScenarioConfig& cfg, double pump_power_w);

// Forward model over the configured power grid.
Report run_simulate(const ScenarioConfig& cfg);

// Trace-driven analysis: per power point either the four coherent S traces
// (two conversions plus both reflections), or pumped noise spectra against a
// zero-pump reference, or both. Incomplete power points are skipped with a
// diagnostic note.
Report run_fit(const ScenarioConfig& cfg, const std::vector<SpectrumTrace>& traces);

struct ChainCalibration {
    CalibrationChain chain;
    bool beta1_known = false;
    bool beta2_known = false;
    bool beta3_known = false;
    double beta4_ci_db = 0.0;
    double n_sys_ci = 0.0;
    double n_add = 0.0;
    RadiometerFit radiometer;
};

// Radiometer fit, loss re-referencing, and the line factors that follow from
// the configured through level / power-ratio pairs.
ChainCalibration run_calibrate(const ScenarioConfig& cfg,
                               const std::vector<RadiometerPoint>& points);

// Grid evaluation over the configured sweep axes; locates the C = 1 pump
// power by inverse interpolation along the power axis.
Report run_sweep(const ScenarioConfig& cfg);

} // namespace eoct

#endif

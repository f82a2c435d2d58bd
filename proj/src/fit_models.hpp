#ifndef EOCT_FIT_MODELS_HPP
#define EOCT_FIT_MODELS_HPP

#include "fit.hpp"
#include "noise.hpp"
#include "physics.hpp"
#include "trace.hpp"

#include <vector>

namespace eoct {

// Microwave reflection dip |S_ee|^2 = ((k_in - k_ex)^2 + 4 d^2)/(k_e^2 + 4 d^2)
// times a scale nuisance. Internally the fit runs over (f0, kappa, u, scale)
// with u = |k_in - k_ex|/k_e, which is globally identifiable; the under/over
// coupled assignment is a caller choice since the squared response cannot
// distinguish the two.
struct ReflectionFit {
    double omega_e_rad_s = 0.0;
    double kappa_in = 0.0; // rad/s
    double kappa_ex = 0.0; // rad/s
    double omega_e_ci = 0.0;
    double kappa_in_ci = 0.0;
    double kappa_ex_ci = 0.0;
    double scale = 1.0;
    bool under_resolved = false;
    FitResult raw;
};

ReflectionFit fit_microwave_reflection(const SpectrumTrace& trace, bool undercoupled = true);

// One optical reflection trace: Lorentzian dip with free depth.
struct OpticalTraceFit {
    double piezo_v = 0.0;
    double omega0_rad_s = 0.0;
    double kappa_o = 0.0; // rad/s
    double kappa_o_ci = 0.0;
    double dip = 0.0; // fractional on-resonance depth, in [0, 1]
    double dip_ci = 0.0;
    FitResult raw;
};

OpticalTraceFit fit_optical_reflection(const SpectrumTrace& trace);

// Joint result of a piezo-voltage coupling sweep: per-trace linewidths, the
// exponential kappa_o(V) fit whose offset is the intrinsic loss, and the
// mode-match factor from the trace closest to critical coupling.
struct CouplingSweepFit {
    double kappa_in_o = 0.0; // rad/s
    double kappa_in_o_ci = 0.0;
    double kappa_ex_v0 = 0.0; // rad/s extrapolated to V = 0
    double kappa_ex_v0_ci = 0.0;
    double decay_per_volt = 0.0; // exponent slope s in kappa_ex ~ exp(s V)
    double decay_per_volt_ci = 0.0;
    double lambda_sq = 0.0;
    double lambda_sq_ci = 0.0;
    bool crossed_critical = false;
    std::vector<OpticalTraceFit> per_trace;
    std::vector<std::string> warnings;
};

CouplingSweepFit fit_optical_coupling_sweep(const std::vector<SpectrumTrace>& traces);

// Two-parameter bath fit of the detected noise spectrum with known kappas
// and system noise.
struct BathsFit {
    NoiseBaths baths{0.0, 0.0};
    double n_wg_ci = 0.0;
    double n_b_ci = 0.0;
    bool clipped = false; // a negative best-fit bath was clipped to zero
    FitResult raw;
};

BathsFit fit_noise_spectrum(const NoiseSpectrum& spectrum, double kappa_in_e,
                            double kappa_ex_e, double n_sys);

// Radiometric chain calibration from a matched-load temperature sweep.
struct RadiometerFit {
    PowerDb beta4_db;
    double n_add = 0.0;
    double beta4_ci_db = 0.0;
    double n_add_ci = 0.0;
    bool degenerate_span = false; // no quantum-to-classical crossover sampled
    FitResult raw;
};

RadiometerFit fit_radiometer(const std::vector<RadiometerPoint>& points,
                             AngularFrequency omega_e, double bw_hz);

// y = prefactor * x^exponent via linear least squares in log-log space.
struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double exponent_ci = 0.0;
    double prefactor_ci = 0.0;
};

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

} // namespace eoct

#endif

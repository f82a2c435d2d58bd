#ifndef EOCT_TRANSDUCTION_HPP
#define EOCT_TRANSDUCTION_HPP

#include "device.hpp"
#include "physics.hpp"

#include <array>

namespace eoct {

using Mat2 = std::array<std::array<double, 2>, 2>;

// 2x2 coherent photon-number conversion ratios at one detuning. Index order
// is (o, e): entries[out][in]. Off-diagonals are reciprocal by construction.
struct ConversionMatrix {
    double omega = 0.0; // detuning from resonance, rad/s
    Mat2 entries{};

    double oo() const { return entries[0][0]; }
    double oe() const { return entries[0][1]; }
    double eo() const { return entries[1][0]; }
    double ee() const { return entries[1][1]; }
};

// Gains/losses of the four measurement lines (power dB) plus the system
// noise referenced to the device output. n_sys includes the vacuum half
// photon, so it can never be below 0.5.
struct CalibrationChain {
    PowerDb beta1; // optical input
    PowerDb beta2; // optical output (EDFA or passive)
    PowerDb beta3; // microwave input
    PowerDb beta4; // microwave output
    double n_sys = 0.5;

    CalibrationChain(PowerDb b1, PowerDb b2, PowerDb b3, PowerDb b4, double n_sys_photons);
};

// The four scattering power ratios entering the in-situ efficiency estimate:
// conversion on resonance, reflections far off resonance.
struct SParamSet {
    double s_eo_on = 0.0;
    double s_oe_on = 0.0;
    double s_ee_off = 0.0;
    double s_oo_off = 0.0;
};

// All four ratios taken on resonance, for the resonant-only estimator.
struct ResonantSParams {
    double s_eo = 0.0;
    double s_oe = 0.0;
    double s_ee = 0.0;
    double s_oo = 0.0;
};

// Coherent conversion matrix at detuning omega for multi-photon coupling
// G = sqrt(n_p) g0. Diagonal numerators carry -G^2 so that every entry stays
// in [0, 1] at all detunings (the beam-splitter interaction is passive).
ConversionMatrix conversion_matrix(const DeviceParams& dev, double g_multiphoton,
                                   double omega_rad_s);

// Total on-resonance conversion efficiency eta_e eta_o Lambda^2 4C/(1+C)^2.
double eta_total(double eta_e, double eta_o, double lambda_sq, double cooperativity);

// Internal efficiency 4C/(1+C)^2; unity at C = 1.
double eta_internal(double cooperativity);

// Normalized conversion spectrum in the symmetric-detuning form,
//   [(1 - 4 d^2/(ko ke))^2 + 4 d^2 (ko+ke)^2/(ko^2 ke^2)]^-1,
// equal to 1 at d = 0.
double conversion_spectrum_norm(double kappa_o, double kappa_e, double delta_rad_s);

// FWHM of conversion_spectrum_norm, closed form (rad/s in, rad/s out).
double bandwidth(double kappa_o, double kappa_e);

// Measured 2x2 scattering power matrix including the transmission-line
// factors beta1..beta4; rows/cols ordered (o, e). On resonance the diagonals
// are beta-weighted ((1 + C - 2 eta)/(1 + C))^2 dips; far off resonance the
// matrix is diag(beta2 beta1, beta4 beta3).
Mat2 smatrix_with_chain(const DeviceParams& dev, double cooperativity,
                        const CalibrationChain& chain, bool on_resonance);

// Eq.-(5)-style estimator sqrt(s_eo s_oe / (s_ee s_oo)); all beta factors
// cancel, leaving the device efficiency.
double self_calibrated_efficiency(const SParamSet& s);

// Resonant-only estimator |2 L2 eta_o - 1| |2 eta_e - 1| sqrt(...), valid for
// C << 1 (caller asserts C < 0.01); rejects the critically coupled
// eta_e = 0.5 and L2 eta_o = 0.5 cases where the reflection dip vanishes.
double resonant_only_efficiency(const ResonantSParams& s_on, double lambda_sq, double eta_o,
                                double eta_e);

// Low-cooperativity limit 4 eta_o eta_e Lambda^2 C.
double low_c_approx(double eta_e, double eta_o, double lambda_sq, double cooperativity);

} // namespace eoct

#endif

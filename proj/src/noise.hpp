#ifndef EOCT_NOISE_HPP
#define EOCT_NOISE_HPP

#include "device.hpp"
#include "physics.hpp"
#include "transduction.hpp"

#include <array>
#include <span>
#include <vector>

namespace eoct {

// Thermal occupancies of the microwave waveguide and cavity-internal baths.
// Both are treated as flat across the analysis band.
struct NoiseBaths {
    double n_wg = 0.0;
    double n_b = 0.0;

    NoiseBaths(double waveguide, double internal_bath);
};

// One radiometric calibration sample: matched-load temperature and the power
// spectral density measured behind the output chain.
struct RadiometerPoint {
    double t_load_k = 0.0;
    double psd_w = 0.0; // per resolution-bandwidth bin

    RadiometerPoint(double t_load, double psd);
};

// Calibrated output-noise spectrum in photons s^-1 Hz^-1 on a grid of
// detunings from the microwave resonance.
struct NoiseSpectrum {
    std::vector<double> freq_offsets; // rad/s
    std::vector<double> n_det;        // photons s^-1 Hz^-1, includes n_sys
};

// 2x2 map from (N_wg, N_b) to the optical/microwave output noise at detuning
// omega; rows ordered (o, e), columns (wg, b). The microwave reflection
// coefficient carries -G^2 so the row never exceeds unity total throughput.
Mat2 noise_conversion_matrix(const DeviceParams& dev, double g_multiphoton,
                             double omega_rad_s);

// Detected output noise in the low-cooperativity limit:
//   4 k_in k_ex / (k_e^2 + 4 w^2) (N_b - N_wg) + N_wg + N_sys.
double detected_noise_spectrum(double kappa_in_e, double kappa_ex_e, const NoiseBaths& baths,
                               double n_sys, double omega_rad_s);

// Incoherent microwave mode occupancy eta_e N_wg + (1 - eta_e) N_b.
double mode_occupancy(double eta_e, const NoiseBaths& baths);

// Thermal emission of a matched load at t_load behind a chain with gain
// beta4, resolved over bandwidth bw:
//   hbar w_e beta4 BW (coth(hbar w_e / 2 k_B T)/2 + N_add);
// the coth term tends to the vacuum 1/2 at T = 0.
double radiometer_psd(double t_load_k, AngularFrequency omega_e, PowerDb beta4, double n_add,
                      double bw_hz);

struct ChainCorrection {
    PowerDb beta4;
    double n_sys = 0.0;
};

// Re-reference the fitted (beta4, N_add) pair from the calibration-load plane
// to the device output plane across an extra loss L (dB):
//   beta4 -> beta4 - L,  N_sys = N_add * 10^(L/10) + 1/2.
// The added noise is divided by the loss transmission when referred to the
// earlier plane; the vacuum half photon is invariant under passive loss.
ChainCorrection chain_correction(PowerDb beta4_fit, double n_add_fit, PowerDb extra_loss);

struct BaselineNormalized {
    std::vector<double> n_det; // N_sys * p / p_ref
    std::vector<double> n_out; // n_det - N_sys
};

// Convert raw ESA bins to photon units against a no-pump reference trace.
BaselineNormalized normalize_baseline(std::span<const double> p_esa,
                                      std::span<const double> p_esa_ref, double n_sys);

// Worst-case linear pulse-heating estimate: rate_ref (P_pulse / P_ref) tau.
double heating_projection(double rate_ref_per_s, double p_ref_w, double p_pulse_w,
                          double tau_s);

// Combined coherent + thermal + vacuum response at one detuning. The vacuum
// half photon is kept separate so the thermal part matches the N_out
// convention (vacuum and system noise excluded).
struct IoModelOutputs {
    std::array<double, 2> coherent{}; // (o, e)
    std::array<double, 2> noise{};    // (o, e), thermal baths only
    static constexpr std::array<double, 2> vacuum{0.5, 0.5};

    std::array<double, 2> total() const
    {
        return {coherent[0] + noise[0] + vacuum[0], coherent[1] + noise[1] + vacuum[1]};
    }
};

IoModelOutputs full_io_model(const DeviceParams& dev, double g_multiphoton, double omega_rad_s,
                             const std::array<double, 2>& coherent_inputs,
                             const NoiseBaths& baths);

} // namespace eoct

#endif

#ifndef EOCT_DEVICE_HPP
#define EOCT_DEVICE_HPP

#include "physics.hpp"

namespace eoct {

// One resonator mode with its intrinsic and extrinsic loss rates (rad/s).
// kappa = 0 is rejected at construction so downstream formulas never divide
// by zero.
class ResonatorMode {
public:
    ResonatorMode(AngularFrequency omega0, double kappa_in, double kappa_ex, int azimuthal_m);

    AngularFrequency omega0() const { return omega0_; }
    double kappa_in() const { return kappa_in_; }
    double kappa_ex() const { return kappa_ex_; }
    double kappa() const { return kappa_in_ + kappa_ex_; }
    int azimuthal_m() const { return azimuthal_m_; }

    // Coupling efficiency eta = kappa_ex / kappa, in [0, 1).
    double eta() const { return kappa_ex_ / kappa(); }
    // Intrinsic fraction kappa_in / kappa, defined as 1 - eta so the pair
    // sums to exactly 1.
    double eta_in() const { return 1.0 - eta(); }

private:
    AngularFrequency omega0_;
    double kappa_in_ = 0.0;
    double kappa_ex_ = 0.0;
    int azimuthal_m_ = 0;
};

// Static parameters of the transducer: microwave mode (e), optical pump mode
// (p), optical signal mode (o), vacuum coupling rate g0, mode-match factor
// Lambda^2 (stored squared; never un-squared) and the optical free spectral
// range. The signal mode must sit one FSR above the pump within tolerance.
class DeviceParams {
public:
    DeviceParams(ResonatorMode mw, ResonatorMode opt_pump, ResonatorMode opt_signal,
                 double g0, double lambda_sq, AngularFrequency fsr,
                 double fsr_tolerance_hz = 1e6);

    const ResonatorMode& mw() const { return mw_; }
    const ResonatorMode& opt_pump() const { return opt_pump_; }
    const ResonatorMode& opt_signal() const { return opt_signal_; }
    double g0() const { return g0_; }
    double lambda_sq() const { return lambda_sq_; }
    AngularFrequency fsr() const { return fsr_; }
    double fsr_tolerance_hz() const { return fsr_tolerance_hz_; }

private:
    ResonatorMode mw_;
    ResonatorMode opt_pump_;
    ResonatorMode opt_signal_;
    double g0_ = 0.0;
    double lambda_sq_ = 0.0;
    AngularFrequency fsr_;
    double fsr_tolerance_hz_ = 1e6;
};

// Evanescent coupling strength vs prism-resonator gap.
class CouplingDistanceModel {
public:
    CouplingDistanceModel(double kappa_ex_max, double k0);
    double kappa_ex_max() const { return kappa_ex_max_; }
    double k0() const { return k0_; }

private:
    double kappa_ex_max_ = 0.0;
    double k0_ = 0.0;
};

// A pump setting with its derived quantities. n_p and C are always computed
// from the device parameters, never stored independently.
class OperatingPoint {
public:
    static OperatingPoint from(const DeviceParams& dev, double pump_power_w,
                               double pump_detuning_rad_s = 0.0);

    double pump_power_w() const { return pump_power_w_; }
    double pump_detuning() const { return pump_detuning_; }
    double photon_number() const { return n_p_; }
    double cooperativity() const { return cooperativity_; }

private:
    OperatingPoint() = default;
    double pump_power_w_ = 0.0;
    double pump_detuning_ = 0.0;
    double n_p_ = 0.0;
    double cooperativity_ = 0.0;
};

// Intra-cavity pump photon number for pump power P_p (W) at the given
// detuning from the pump resonance:
//   n_p = (P_p Lambda^2 / hbar w_p) * 4 kappa_ex,p / (kappa_p^2 + 4 detuning^2)
double pump_photon_number(const DeviceParams& dev, double pump_power_w,
                          double detuning_rad_s = 0.0);

// Multi-photon cooperativity C = 4 n_p g0^2 / (kappa_o kappa_e).
double cooperativity(const DeviceParams& dev, double n_p);

// kappa_ex(d) = kappa_ex_max * exp(-k0 d).
double kappa_ex_of_distance(const CouplingDistanceModel& model, double distance_m);

// Evanescent decay constant k0 = w_o sqrt(n^2 - 1) / c. Requires n > 1.
double evanescent_k0(AngularFrequency omega_o, double n_refr);

// Vacuum coupling rate from a measured optical mode splitting S under a
// strong microwave drive with n_e intra-cavity photons: g = S / (4 sqrt(n_e)).
double g_from_splitting(double splitting_rad_s, double n_e);

// Reduced overlap-integral expression g = (1/8) n^2 w_o r33 E_eo, with the
// peak single-photon microwave field E_eo supplied externally.
double g_reduced_overlap(double n_refr, AngularFrequency omega_o, double r33_m_per_v,
                         double e_eo_v_per_m);

// Angular momentum conservation m_o = m_p + m_e.
bool phase_match_check(int m_p, int m_e, int m_o);

// Normalized optical reflection at detuning delta from the mode:
//   1 - 4 kappa_ex L2 (kappa - L2 kappa_ex) / (kappa^2 + 4 delta^2)
// A result outside [0, 1] signals inconsistent parameters and is rejected.
double optical_reflection_spectrum(const ResonatorMode& mode, double lambda_sq,
                                   double delta_rad_s);

} // namespace eoct

#endif

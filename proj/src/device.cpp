#include "device.hpp"

#include "error.hpp"

#include <cmath>
#include <string>

namespace eoct {

ResonatorMode::ResonatorMode(AngularFrequency omega0, double kappa_in, double kappa_ex,
                             int azimuthal_m)
    : omega0_(omega0), kappa_in_(kappa_in), kappa_ex_(kappa_ex), azimuthal_m_(azimuthal_m)
{
    if (!std::isfinite(kappa_in) || kappa_in <= 0.0)
        fail(Errc::invalid_input, "ResonatorMode: kappa_in must be > 0");
    if (!std::isfinite(kappa_ex) || kappa_ex < 0.0)
        fail(Errc::invalid_input, "ResonatorMode: kappa_ex must be >= 0");
}

DeviceParams::DeviceParams(ResonatorMode mw, ResonatorMode opt_pump, ResonatorMode opt_signal,
                           double g0, double lambda_sq, AngularFrequency fsr,
                           double fsr_tolerance_hz)
    : mw_(mw), opt_pump_(opt_pump), opt_signal_(opt_signal), g0_(g0), lambda_sq_(lambda_sq),
      fsr_(fsr), fsr_tolerance_hz_(fsr_tolerance_hz)
{
    if (!std::isfinite(g0) || g0 < 0.0)
        fail(Errc::invalid_input, "DeviceParams: g0 must be >= 0");
    if (!std::isfinite(lambda_sq) || lambda_sq < 0.0 || lambda_sq > 1.0)
        fail(Errc::invalid_input, "DeviceParams: lambda_sq must be in [0, 1]");
    if (!std::isfinite(fsr_tolerance_hz) || fsr_tolerance_hz < 0.0)
        fail(Errc::invalid_input, "DeviceParams: fsr tolerance must be >= 0");
    const double mismatch_hz =
        std::abs(opt_signal_.omega0().hz() - (opt_pump_.omega0().hz() + fsr_.hz()));
    if (mismatch_hz > fsr_tolerance_hz_)
        fail(Errc::invalid_input,
             "DeviceParams: omega_o != omega_p + FSR (mismatch " + std::to_string(mismatch_hz) +
                 " Hz exceeds tolerance " + std::to_string(fsr_tolerance_hz_) + " Hz)");
}

CouplingDistanceModel::CouplingDistanceModel(double kappa_ex_max, double k0)
    : kappa_ex_max_(kappa_ex_max), k0_(k0)
{
    if (!std::isfinite(kappa_ex_max) || kappa_ex_max <= 0.0)
        fail(Errc::invalid_input, "CouplingDistanceModel: kappa_ex_max must be > 0");
    if (!std::isfinite(k0) || k0 <= 0.0)
        fail(Errc::invalid_input, "CouplingDistanceModel: k0 must be > 0");
}

OperatingPoint OperatingPoint::from(const DeviceParams& dev, double pump_power_w,
                                    double pump_detuning_rad_s)
{
    OperatingPoint op;
    op.pump_power_w_ = pump_power_w;
    op.pump_detuning_ = pump_detuning_rad_s;
    op.n_p_ = pump_photon_number(dev, pump_power_w, pump_detuning_rad_s);
    op.cooperativity_ = eoct::cooperativity(dev, op.n_p_);
    return op;
}

double pump_photon_number(const DeviceParams& dev, double pump_power_w, double detuning_rad_s)
{
    if (!std::isfinite(pump_power_w) || pump_power_w < 0.0)
        fail(Errc::invalid_input, "pump_photon_number: pump power must be >= 0");
    const ResonatorMode& p = dev.opt_pump();
    const double kappa = p.kappa();
    const double lorentz = 4.0 * p.kappa_ex() / (kappa * kappa + 4.0 * detuning_rad_s * detuning_rad_s);
    return pump_power_w * dev.lambda_sq() / (consts::hbar * p.omega0().rad_s()) * lorentz;
}

double cooperativity(const DeviceParams& dev, double n_p)
{
    if (!std::isfinite(n_p) || n_p < 0.0)
        fail(Errc::invalid_input, "cooperativity: n_p must be >= 0");
    const double g0 = dev.g0();
    return 4.0 * n_p * g0 * g0 / (dev.opt_signal().kappa() * dev.mw().kappa());
}

double kappa_ex_of_distance(const CouplingDistanceModel& model, double distance_m)
{
    if (!std::isfinite(distance_m) || distance_m < 0.0)
        fail(Errc::invalid_input, "kappa_ex_of_distance: distance must be >= 0");
    return model.kappa_ex_max() * std::exp(-model.k0() * distance_m);
}

double evanescent_k0(AngularFrequency omega_o, double n_refr)
{
    if (!std::isfinite(n_refr) || n_refr <= 1.0)
        fail(Errc::invalid_input, "evanescent_k0: refractive index must be > 1");
    return omega_o.rad_s() * std::sqrt(n_refr * n_refr - 1.0) / consts::c;
}

double g_from_splitting(double splitting_rad_s, double n_e)
{
    if (!std::isfinite(splitting_rad_s) || splitting_rad_s < 0.0)
        fail(Errc::invalid_input, "g_from_splitting: splitting must be >= 0");
    if (!std::isfinite(n_e) || n_e <= 0.0)
        fail(Errc::invalid_input, "g_from_splitting: n_e must be > 0");
    return splitting_rad_s / (4.0 * std::sqrt(n_e));
}

double g_reduced_overlap(double n_refr, AngularFrequency omega_o, double r33_m_per_v,
                         double e_eo_v_per_m)
{
    if (n_refr < 0.0 || r33_m_per_v < 0.0 || e_eo_v_per_m < 0.0)
        fail(Errc::invalid_input, "g_reduced_overlap: inputs must be >= 0");
    return 0.125 * n_refr * n_refr * omega_o.rad_s() * r33_m_per_v * e_eo_v_per_m;
}

bool phase_match_check(int m_p, int m_e, int m_o)
{
    return m_o == m_p + m_e;
}

double optical_reflection_spectrum(const ResonatorMode& mode, double lambda_sq,
                                   double delta_rad_s)
{
    if (!std::isfinite(lambda_sq) || lambda_sq < 0.0 || lambda_sq > 1.0)
        fail(Errc::invalid_input, "optical_reflection_spectrum: lambda_sq must be in [0, 1]");
    const double kappa = mode.kappa();
    const double coupled = lambda_sq * mode.kappa_ex();
    const double r = 1.0 - 4.0 * coupled * (kappa - coupled) /
                               (kappa * kappa + 4.0 * delta_rad_s * delta_rad_s);
    if (r < -1e-12 || r > 1.0 + 1e-12)
        fail(Errc::invalid_input, "optical_reflection_spectrum: inconsistent parameters, "
                                  "reflection outside [0, 1]");
    return r;
}

} // namespace eoct

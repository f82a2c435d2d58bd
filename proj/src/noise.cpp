#include "noise.hpp"

#include "error.hpp"

#include <cmath>
#include <complex>

namespace eoct {

namespace {
using cplx = std::complex<double>;
}

NoiseBaths::NoiseBaths(double waveguide, double internal_bath)
    : n_wg(waveguide), n_b(internal_bath)
{
    if (!std::isfinite(n_wg) || n_wg < 0.0 || !std::isfinite(n_b) || n_b < 0.0)
        fail(Errc::invalid_input, "NoiseBaths: occupancies must be >= 0");
}

RadiometerPoint::RadiometerPoint(double t_load, double psd) : t_load_k(t_load), psd_w(psd)
{
    if (!std::isfinite(t_load) || t_load <= 0.0)
        fail(Errc::invalid_input, "RadiometerPoint: load temperature must be > 0");
    if (!std::isfinite(psd) || psd <= 0.0)
        fail(Errc::invalid_input, "RadiometerPoint: psd must be > 0");
}

Mat2 noise_conversion_matrix(const DeviceParams& dev, double g_multiphoton, double omega_rad_s)
{
    if (!std::isfinite(g_multiphoton) || g_multiphoton < 0.0)
        fail(Errc::invalid_input, "noise_conversion_matrix: G must be >= 0");
    const double ko = dev.opt_signal().kappa();
    const double ke = dev.mw().kappa();
    const double kxo = dev.opt_signal().kappa_ex();
    const double kxe = dev.mw().kappa_ex();
    const double kie = dev.mw().kappa_in();
    const double g2 = g_multiphoton * g_multiphoton;
    const double w = omega_rad_s;

    const cplx d_o(ko / 2.0, -w);
    const cplx d_e(ke / 2.0, -w);
    const double m_inv = std::norm(d_o * d_e + g2);

    // Upconverted microwave noise reaching the optical port.
    const double s_o_wg = kxe * kxo * g2 / m_inv;
    const double s_o_b = kie * kxo * g2 / m_inv;

    // Waveguide noise reflecting off the cavity, internal-bath noise leaking
    // out through the coupler.
    const cplx a_e(kxe - ke / 2.0, w);
    const double s_e_wg = std::norm(a_e * d_o - g2) / m_inv;
    const double s_e_b = kie * kxe * std::norm(d_o) / m_inv;

    return {{{s_o_wg, s_o_b}, {s_e_wg, s_e_b}}};
}

double detected_noise_spectrum(double kappa_in_e, double kappa_ex_e, const NoiseBaths& baths,
                               double n_sys, double omega_rad_s)
{
    if (kappa_in_e <= 0.0 || kappa_ex_e < 0.0)
        fail(Errc::invalid_input, "detected_noise_spectrum: invalid kappas");
    const double kappa = kappa_in_e + kappa_ex_e;
    const double lorentz = 4.0 * kappa_in_e * kappa_ex_e /
                           (kappa * kappa + 4.0 * omega_rad_s * omega_rad_s);
    return lorentz * (baths.n_b - baths.n_wg) + baths.n_wg + n_sys;
}

double mode_occupancy(double eta_e, const NoiseBaths& baths)
{
    if (!std::isfinite(eta_e) || eta_e < 0.0 || eta_e > 1.0)
        fail(Errc::invalid_input, "mode_occupancy: eta_e must be in [0, 1]");
    return eta_e * baths.n_wg + (1.0 - eta_e) * baths.n_b;
}

double radiometer_psd(double t_load_k, AngularFrequency omega_e, PowerDb beta4, double n_add,
                      double bw_hz)
{
    if (!std::isfinite(t_load_k) || t_load_k < 0.0)
        fail(Errc::invalid_input, "radiometer_psd: load temperature must be >= 0");
    if (bw_hz <= 0.0) fail(Errc::invalid_input, "radiometer_psd: bandwidth must be > 0");
    double thermal = 0.5;
    if (t_load_k > 0.0) {
        const double x = consts::hbar * omega_e.rad_s() / (2.0 * consts::k_b * t_load_k);
        thermal = 0.5 / std::tanh(x);
    }
    return consts::hbar * omega_e.rad_s() * beta4.linear() * bw_hz * (thermal + n_add);
}

ChainCorrection chain_correction(PowerDb beta4_fit, double n_add_fit, PowerDb extra_loss)
{
    if (extra_loss.db() < 0.0)
        fail(Errc::invalid_input, "chain_correction: extra loss must be >= 0 dB");
    if (!std::isfinite(n_add_fit) || n_add_fit < 0.0)
        fail(Errc::invalid_input, "chain_correction: n_add must be >= 0");
    ChainCorrection out;
    out.beta4 = PowerDb::from_db(beta4_fit.db() - extra_loss.db());
    out.n_sys = n_add_fit * extra_loss.linear() + 0.5;
    return out;
}

BaselineNormalized normalize_baseline(std::span<const double> p_esa,
                                      std::span<const double> p_esa_ref, double n_sys)
{
    if (p_esa.size() != p_esa_ref.size())
        fail(Errc::invalid_input, "normalize_baseline: trace lengths differ");
    if (!std::isfinite(n_sys) || n_sys < 0.5)
        fail(Errc::invalid_input, "normalize_baseline: n_sys must be >= 0.5");
    BaselineNormalized out;
    out.n_det.reserve(p_esa.size());
    out.n_out.reserve(p_esa.size());
    for (std::size_t i = 0; i < p_esa.size(); ++i) {
        if (!(p_esa_ref[i] > 0.0))
            fail(Errc::invalid_input, "normalize_baseline: reference bin must be > 0");
        const double n_det = n_sys * p_esa[i] / p_esa_ref[i];
        out.n_det.push_back(n_det);
        out.n_out.push_back(n_det - n_sys);
    }
    return out;
}

double heating_projection(double rate_ref_per_s, double p_ref_w, double p_pulse_w, double tau_s)
{
    if (rate_ref_per_s < 0.0 || p_ref_w < 0.0 || p_pulse_w < 0.0 || tau_s < 0.0)
        fail(Errc::invalid_input, "heating_projection: inputs must be >= 0");
    if (p_ref_w == 0.0) fail(Errc::invalid_input, "heating_projection: reference power must be > 0");
    return rate_ref_per_s * (p_pulse_w / p_ref_w) * tau_s;
}

IoModelOutputs full_io_model(const DeviceParams& dev, double g_multiphoton, double omega_rad_s,
                             const std::array<double, 2>& coherent_inputs,
                             const NoiseBaths& baths)
{
    const ConversionMatrix eta = conversion_matrix(dev, g_multiphoton, omega_rad_s);
    const Mat2 sigma = noise_conversion_matrix(dev, g_multiphoton, omega_rad_s);
    IoModelOutputs out;
    for (int i = 0; i < 2; ++i) {
        out.coherent[i] = eta.entries[i][0] * coherent_inputs[0] +
                          eta.entries[i][1] * coherent_inputs[1];
        out.noise[i] = sigma[i][0] * baths.n_wg + sigma[i][1] * baths.n_b;
    }
    return out;
}

} // namespace eoct

#include "transduction.hpp"

#include "error.hpp"

#include <cmath>
#include <complex>

namespace eoct {

namespace {

using cplx = std::complex<double>;

void require_nonneg(double x, const char* what)
{
    if (!std::isfinite(x) || x < 0.0) fail(Errc::invalid_input, std::string(what) + " must be >= 0");
}

} // namespace

CalibrationChain::CalibrationChain(PowerDb b1, PowerDb b2, PowerDb b3, PowerDb b4,
                                   double n_sys_photons)
    : beta1(b1), beta2(b2), beta3(b3), beta4(b4), n_sys(n_sys_photons)
{
    if (!std::isfinite(n_sys_photons) || n_sys_photons < 0.5)
        fail(Errc::invalid_input,
             "CalibrationChain: n_sys must be >= 0.5 (includes the vacuum half photon)");
}

ConversionMatrix conversion_matrix(const DeviceParams& dev, double g_multiphoton,
                                   double omega_rad_s)
{
    require_nonneg(g_multiphoton, "conversion_matrix: G");
    const double ko = dev.opt_signal().kappa();
    const double ke = dev.mw().kappa();
    const double kxo = dev.opt_signal().kappa_ex();
    const double kxe = dev.mw().kappa_ex();
    const double l2 = dev.lambda_sq();
    const double g2 = g_multiphoton * g_multiphoton;
    const double w = omega_rad_s;

    const cplx d_o(ko / 2.0, -w);
    const cplx d_e(ke / 2.0, -w);
    const double m_inv = std::norm(d_o * d_e + g2);

    // Diagonals: (i w + kappa_ex' - kappa/2) against the other mode's response.
    const cplx a_o(l2 * kxo - ko / 2.0, w);
    const cplx a_e(kxe - ke / 2.0, w);
    const double s_oo = std::norm(a_o * d_e - g2) / m_inv;
    const double s_ee = std::norm(a_e * d_o - g2) / m_inv;

    // Reciprocity holds exactly: both off-diagonals are the same expression,
    // computed once.
    const double s_conv = l2 * kxe * kxo * g2 / m_inv;

    ConversionMatrix m;
    m.omega = w;
    m.entries = {{{s_oo, s_conv}, {s_conv, s_ee}}};
    return m;
}

double eta_total(double eta_e, double eta_o, double lambda_sq, double cooperativity)
{
    require_nonneg(cooperativity, "eta_total: C");
    return eta_e * eta_o * lambda_sq * eta_internal(cooperativity);
}

double eta_internal(double cooperativity)
{
    require_nonneg(cooperativity, "eta_internal: C");
    const double c1 = 1.0 + cooperativity;
    return 4.0 * cooperativity / (c1 * c1);
}

double conversion_spectrum_norm(double kappa_o, double kappa_e, double delta_rad_s)
{
    if (kappa_o <= 0.0 || kappa_e <= 0.0)
        fail(Errc::invalid_input, "conversion_spectrum_norm: kappas must be > 0");
    const double d2 = delta_rad_s * delta_rad_s;
    const double lhs = 1.0 - 4.0 * d2 / (kappa_o * kappa_e);
    const double cross = 4.0 * d2 * (kappa_o + kappa_e) * (kappa_o + kappa_e) /
                         (kappa_o * kappa_o * kappa_e * kappa_e);
    return 1.0 / (lhs * lhs + cross);
}

double bandwidth(double kappa_o, double kappa_e)
{
    if (kappa_o <= 0.0 || kappa_e <= 0.0)
        fail(Errc::invalid_input, "bandwidth: kappas must be > 0");
    // Half-maximum condition is a quadratic in u = delta^2:
    //   a^2 u^2 + (b - 2a) u - 1 = 0,
    // with a = 4/(ko ke) and b = 4 (ko+ke)^2/(ko ke)^2; FWHM = 2 sqrt(u+).
    const double a = 4.0 / (kappa_o * kappa_e);
    const double sum = kappa_o + kappa_e;
    const double b = 4.0 * sum * sum / (kappa_o * kappa_o * kappa_e * kappa_e);
    const double q = b - 2.0 * a;
    const double u = ((-q) + std::sqrt(q * q + 4.0 * a * a)) / (2.0 * a * a);
    return 2.0 * std::sqrt(u);
}

Mat2 smatrix_with_chain(const DeviceParams& dev, double cooperativity,
                        const CalibrationChain& chain, bool on_resonance)
{
    require_nonneg(cooperativity, "smatrix_with_chain: C");
    const double b1 = chain.beta1.linear();
    const double b2 = chain.beta2.linear();
    const double b3 = chain.beta3.linear();
    const double b4 = chain.beta4.linear();
    if (!on_resonance) return {{{b2 * b1, 0.0}, {0.0, b4 * b3}}};

    const double c = cooperativity;
    const double eta_e = dev.mw().eta();
    const double eta_o = dev.opt_signal().eta();
    const double l2 = dev.lambda_sq();
    const double inv = 1.0 / ((1.0 + c) * (1.0 + c));
    const double dip_o = 1.0 + c - 2.0 * l2 * eta_o;
    const double dip_e = 1.0 + c - 2.0 * eta_e;
    const double conv = 4.0 * eta_o * eta_e * c * l2;

    return {{{b2 * dip_o * dip_o * b1 * inv, b2 * conv * b3 * inv},
             {b4 * conv * b1 * inv, b4 * dip_e * dip_e * b3 * inv}}};
}

double self_calibrated_efficiency(const SParamSet& s)
{
    if (s.s_eo_on < 0.0 || s.s_oe_on < 0.0 || s.s_ee_off <= 0.0 || s.s_oo_off <= 0.0)
        fail(Errc::invalid_input,
             "self_calibrated_efficiency: conversion ratios must be >= 0 and reflection "
             "ratios > 0");
    return std::sqrt((s.s_eo_on * s.s_oe_on) / (s.s_ee_off * s.s_oo_off));
}

double resonant_only_efficiency(const ResonantSParams& s_on, double lambda_sq, double eta_o,
                                double eta_e)
{
    if (s_on.s_eo < 0.0 || s_on.s_oe < 0.0 || s_on.s_ee <= 0.0 || s_on.s_oo <= 0.0)
        fail(Errc::invalid_input,
             "resonant_only_efficiency: conversion ratios must be >= 0 and reflection "
             "ratios > 0");
    const double fe = 2.0 * eta_e - 1.0;
    const double fo = 2.0 * lambda_sq * eta_o - 1.0;
    if (std::abs(fe) < 1e-12)
        fail(Errc::invalid_input,
             "resonant_only_efficiency: eta_e = 0.5 (vanishing reflection dip)");
    if (std::abs(fo) < 1e-12)
        fail(Errc::invalid_input,
             "resonant_only_efficiency: lambda_sq * eta_o = 0.5 (vanishing reflection dip)");
    // Power ratios carry no sign, so the prefactor enters as a magnitude;
    // both factors are negative in the under-coupled regime.
    return std::abs(fo) * std::abs(fe) *
           std::sqrt((s_on.s_eo * s_on.s_oe) / (s_on.s_ee * s_on.s_oo));
}

double low_c_approx(double eta_e, double eta_o, double lambda_sq, double cooperativity)
{
    require_nonneg(cooperativity, "low_c_approx: C");
    return 4.0 * eta_o * eta_e * lambda_sq * cooperativity;
}

} // namespace eoct

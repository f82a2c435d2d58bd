#include "pipeline.hpp"

#include "error.hpp"
#include "noise.hpp"
#include "util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace eoct {

namespace {

constexpr const char* kVersion = "eoct 0.1.0";

double nanv()
{
    return ReportRow::nan_value();
}

// Median of the outer `frac` of bins on each side.
double outer_median(const std::vector<double>& v, double frac = 0.1)
{
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(frac * v.size()));
    std::vector<double> outer(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
    outer.insert(outer.end(), v.end() - static_cast<std::ptrdiff_t>(k), v.end());
    std::sort(outer.begin(), outer.end());
    const std::size_t n = outer.size();
    return n % 2 ? outer[n / 2] : 0.5 * (outer[n / 2 - 1] + outer[n / 2]);
}

double outer_stddev(const std::vector<double>& v, double frac = 0.1)
{
    const std::size_t k = std::max<std::size_t>(2, static_cast<std::size_t>(frac * v.size()));
    std::vector<double> outer(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
    outer.insert(outer.end(), v.end() - static_cast<std::ptrdiff_t>(k), v.end());
    double mean = 0.0;
    for (double x : outer) mean += x;
    mean /= static_cast<double>(outer.size());
    double acc = 0.0;
    for (double x : outer) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(outer.size() - 1));
}

// Divide out a smooth multiplicative ripple fitted on the outer bins, keeping
// the mean level (which carries the line factors) untouched.
std::vector<double> divide_baseline_ripple(const std::vector<double>& f,
                                           const std::vector<double>& v, int order)
{
    if (order <= 0) return v;
    const std::size_t n = v.size();
    const std::size_t k = std::max<std::size_t>(static_cast<std::size_t>(order) + 1,
                                                static_cast<std::size_t>(0.1 * n));
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < k; ++i) idx.push_back(i);
    for (std::size_t i = n - k; i < n; ++i) idx.push_back(i);

    // Least-squares polynomial in a normalized abscissa.
    const double f0 = f.front(), f1 = f.back();
    auto t_of = [&](double x) { return 2.0 * (x - f0) / (f1 - f0) - 1.0; };
    const int m = order + 1;
    std::vector<double> ata(static_cast<std::size_t>(m * m), 0.0);
    std::vector<double> atb(static_cast<std::size_t>(m), 0.0);
    for (std::size_t i : idx) {
        double powj = 1.0;
        std::vector<double> row(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            row[static_cast<std::size_t>(j)] = powj;
            powj *= t_of(f[i]);
        }
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b)
                ata[static_cast<std::size_t>(a * m + b)] +=
                    row[static_cast<std::size_t>(a)] * row[static_cast<std::size_t>(b)];
            atb[static_cast<std::size_t>(a)] += row[static_cast<std::size_t>(a)] * v[i];
        }
    }
    // Gaussian elimination with partial pivoting on the tiny normal system.
    std::vector<double> coef(static_cast<std::size_t>(m), 0.0);
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(ata[static_cast<std::size_t>(r * m + col)]) >
                std::abs(ata[static_cast<std::size_t>(piv * m + col)]))
                piv = r;
        for (int c = 0; c < m; ++c)
            std::swap(ata[static_cast<std::size_t>(col * m + c)],
                      ata[static_cast<std::size_t>(piv * m + c)]);
        std::swap(atb[static_cast<std::size_t>(col)], atb[static_cast<std::size_t>(piv)]);
        const double d = ata[static_cast<std::size_t>(col * m + col)];
        if (std::abs(d) < 1e-300) return v; // degenerate; skip correction
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double fct = ata[static_cast<std::size_t>(r * m + col)] / d;
            for (int c = 0; c < m; ++c)
                ata[static_cast<std::size_t>(r * m + c)] -=
                    fct * ata[static_cast<std::size_t>(col * m + c)];
            atb[static_cast<std::size_t>(r)] -= fct * atb[static_cast<std::size_t>(col)];
        }
    }
    for (int j = 0; j < m; ++j)
        coef[static_cast<std::size_t>(j)] =
            atb[static_cast<std::size_t>(j)] / ata[static_cast<std::size_t>(j * m + j)];

    double mean_poly = 0.0;
    std::vector<double> poly(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0, powj = 1.0;
        for (int j = 0; j < m; ++j) {
            acc += coef[static_cast<std::size_t>(j)] * powj;
            powj *= t_of(f[i]);
        }
        poly[i] = acc;
        mean_poly += acc;
    }
    mean_poly /= static_cast<double>(n);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ripple = poly[i] / mean_poly;
        out[i] = ripple > 0.0 ? v[i] / ripple : v[i];
    }
    return out;
}

// Invert eta_int = 4C/(1+C)^2 on the C < 1 branch.
double invert_eta_internal(double r)
{
    if (!(r > 0.0) || r > 1.0) return nanv();
    return ((2.0 - r) - 2.0 * std::sqrt(1.0 - r)) / r;
}

struct PowerGroup {
    std::vector<const SpectrumTrace*> conversions;
    const SpectrumTrace* reflection_mw = nullptr;
    const SpectrumTrace* reflection_opt = nullptr;
    std::vector<const SpectrumTrace*> noise;
};

} // namespace

const char* tool_version()
{
    return kVersion;
}

SimPoint evaluate_point(const ScenarioConfig& cfg, double pump_power_w)
{
    const ResonatorMode mw = cfg.mw_at_power(pump_power_w);
    const DeviceParams& dev = cfg.device;
    SimPoint pt;
    pt.n_p = pump_photon_number(dev, pump_power_w);
    const double g0 = dev.g0();
    pt.cooperativity = 4.0 * pt.n_p * g0 * g0 / (dev.opt_signal().kappa() * mw.kappa());
    pt.eta_tot = eta_total(mw.eta(), dev.opt_signal().eta(), dev.lambda_sq(), pt.cooperativity);
    pt.eta_int = eta_internal(pt.cooperativity);
    pt.bandwidth_hz = bandwidth(dev.opt_signal().kappa(), mw.kappa()) / consts::two_pi;
    pt.kappa_e_hz = mw.kappa() / consts::two_pi;
    pt.kappa_o_hz = dev.opt_signal().kappa() / consts::two_pi;
    return pt;
}

Report run_simulate(const ScenarioConfig& cfg)
{
    Report rep;
    rep.tool_version = kVersion;
    rep.config_hash = cfg.config_hash;
    rep.sideband_suppression_db = cfg.sideband_suppression_db;
    if (cfg.power_grid_w.empty())
        fail(Errc::bad_config, "simulate: config has no power_grid_w");

    for (double p : cfg.power_grid_w) {
        const ResonatorMode mw = cfg.mw_at_power(p);
        const SimPoint pt = evaluate_point(cfg, p);
        ReportRow row;
        row.pump_power_w = p;
        row.n_p = pt.n_p;
        row.cooperativity = pt.cooperativity;
        row.eta_tot = pt.eta_tot;
        row.eta_int = pt.eta_int;
        row.bandwidth_hz = pt.bandwidth_hz;
        if (cfg.n_wg_model && cfg.n_b_model) {
            const NoiseBaths baths(cfg.n_wg_model->at(p), cfg.n_b_model->at(p));
            row.n_wg = baths.n_wg;
            row.n_b = baths.n_b;
            row.n_e = mode_occupancy(mw.eta(), baths);
            row.n_out = detected_noise_spectrum(mw.kappa_in(), mw.kappa_ex(), baths, 0.0, 0.0);
        }
        const double ceiling = mw.eta() * cfg.device.opt_signal().eta() * cfg.device.lambda_sq();
        check_row_invariants(row, ceiling);
        rep.rows.push_back(std::move(row));

        if (cfg.options.emit_spectra) {
            SpectrumRecord rec;
            rec.pump_power_w = p;
            rec.label = "conversion_theory";
            const double kmax = std::max(mw.kappa(), cfg.device.opt_signal().kappa());
            const int npts = 201;
            for (int i = 0; i < npts; ++i) {
                const double d = (static_cast<double>(i) / (npts - 1) - 0.5) * 6.0 * kmax;
                const double s =
                    conversion_spectrum_norm(cfg.device.opt_signal().kappa(), mw.kappa(), d);
                rec.x_hz.push_back(d / consts::two_pi);
                rec.measured.push_back(s);
                rec.fitted.push_back(s);
            }
            rep.spectra.push_back(std::move(rec));
        }
    }
    return rep;
}

Report run_fit(const ScenarioConfig& cfg, const std::vector<SpectrumTrace>& traces)
{
    Report rep;
    rep.tool_version = kVersion;
    rep.config_hash = cfg.config_hash;
    rep.sideband_suppression_db = cfg.sideband_suppression_db;
    if (traces.empty()) {
        rep.warnings.push_back("no traces supplied; report is empty");
        return rep;
    }

    std::map<double, PowerGroup> groups;
    const SpectrumTrace* noise_reference = nullptr;
    for (const auto& t : traces) {
        const auto p = t.pump_power_w();
        if (!p) {
            rep.warnings.push_back("trace without pump_power_w ignored");
            continue;
        }
        if (t.kind == TraceKind::noise_psd && *p == 0.0) {
            noise_reference = &t;
            continue;
        }
        PowerGroup& g = groups[*p];
        switch (t.kind) {
            case TraceKind::conversion: g.conversions.push_back(&t); break;
            case TraceKind::reflection_mw: g.reflection_mw = &t; break;
            case TraceKind::reflection_opt: g.reflection_opt = &t; break;
            case TraceKind::noise_psd: g.noise.push_back(&t); break;
        }
    }

    const DeviceParams& dev = cfg.device;
    for (const auto& [p_w, group] : groups) {
        ReportRow row;
        row.pump_power_w = p_w;
        row.n_p = pump_photon_number(dev, p_w);
        bool have_any = false;

        double eta_e = nanv();
        double kappa_in_e = nanv(), kappa_ex_e = nanv();
        std::optional<ReflectionFit> mw_fit;
        if (group.reflection_mw) {
            SpectrumTrace corrected = *group.reflection_mw;
            corrected.value = divide_baseline_ripple(corrected.freq_hz, corrected.value,
                                                     cfg.options.baseline_poly_order);
            mw_fit = fit_microwave_reflection(corrected);
            kappa_in_e = mw_fit->kappa_in;
            kappa_ex_e = mw_fit->kappa_ex;
            eta_e = kappa_ex_e / (kappa_in_e + kappa_ex_e);
        }

        const bool conversion_complete = group.conversions.size() >= 2 &&
                                         group.reflection_mw && group.reflection_opt;
        if (!conversion_complete &&
            (!group.conversions.empty() || group.reflection_mw || group.reflection_opt)) {
            row.notes.push_back("conversion branch skipped: needs two conversion traces plus "
                                "both reflections");
        }
        if (conversion_complete) {
            SpectrumTrace r_mw = *group.reflection_mw;
            r_mw.value = divide_baseline_ripple(r_mw.freq_hz, r_mw.value,
                                                cfg.options.baseline_poly_order);
            SpectrumTrace r_opt = *group.reflection_opt;
            r_opt.value = divide_baseline_ripple(r_opt.freq_hz, r_opt.value,
                                                 cfg.options.baseline_poly_order);

            const double s_ee_off = outer_median(r_mw.value);
            const double s_oo_off = outer_median(r_opt.value);
            const double s_a = *std::max_element(group.conversions[0]->value.begin(),
                                                 group.conversions[0]->value.end());
            const double s_b = *std::max_element(group.conversions[1]->value.begin(),
                                                 group.conversions[1]->value.end());
            SParamSet sp{s_a, s_b, s_ee_off, s_oo_off};
            row.eta_tot = self_calibrated_efficiency(sp);

            // Uncertainty from the off-resonance scatter of each trace.
            auto rel_var = [](const SpectrumTrace& t, double level) {
                const double sd = outer_stddev(t.value);
                return level > 0.0 ? (sd / level) * (sd / level) : 0.0;
            };
            const double rv = rel_var(*group.conversions[0], s_a) +
                              rel_var(*group.conversions[1], s_b) +
                              rel_var(r_mw, s_ee_off) + rel_var(r_opt, s_oo_off);
            row.eta_tot_ci = 1.96 * row.eta_tot * 0.5 * std::sqrt(rv);

            const double eta_o = dev.opt_signal().eta();
            const double ceiling = eta_e * eta_o * dev.lambda_sq();
            row.cooperativity = invert_eta_internal(row.eta_tot / ceiling);

            const OpticalTraceFit opt_fit = fit_optical_reflection(r_opt);
            row.bandwidth_hz =
                bandwidth(opt_fit.kappa_o, kappa_in_e + kappa_ex_e) / consts::two_pi;
            row.eta_int = std::isnan(row.cooperativity) ? nanv()
                                                        : eta_internal(row.cooperativity);
            check_row_invariants(row, ceiling);
            have_any = true;
        }

        if (!group.noise.empty()) {
            if (!cfg.chain) fail(Errc::bad_config, "fit: noise traces require chain.n_sys");
            if (!noise_reference)
                fail(Errc::invalid_input,
                     "fit: noise traces require a zero-pump reference noise_psd trace");
            const SpectrumTrace& pumped = *group.noise.front();
            if (pumped.freq_hz.size() != noise_reference->freq_hz.size())
                fail(Errc::invalid_input, "fit: noise trace grids differ from reference");
            const double n_sys = cfg.chain->n_sys;
            const BaselineNormalized norm =
                normalize_baseline(pumped.value, noise_reference->value, n_sys);

            const double f_center =
                0.5 * (pumped.freq_hz.front() + pumped.freq_hz.back());
            NoiseSpectrum spec;
            spec.freq_offsets.reserve(pumped.freq_hz.size());
            for (double f : pumped.freq_hz)
                spec.freq_offsets.push_back(consts::two_pi * (f - f_center));
            spec.n_det = norm.n_det;

            double kin = kappa_in_e, kex = kappa_ex_e;
            if (std::isnan(kin)) {
                const ResonatorMode mw = cfg.mw_at_power(p_w);
                kin = mw.kappa_in();
                kex = mw.kappa_ex();
            }
            const BathsFit baths = fit_noise_spectrum(spec, kin, kex, n_sys);
            row.n_wg = baths.baths.n_wg;
            row.n_b = baths.baths.n_b;
            row.n_wg_ci = baths.n_wg_ci;
            row.n_b_ci = baths.n_b_ci;
            row.n_e = mode_occupancy(kex / (kin + kex), baths.baths);
            row.n_out = detected_noise_spectrum(kin, kex, baths.baths, 0.0, 0.0);
            for (const auto& w : baths.raw.warnings) row.notes.push_back(w);
            check_row_invariants(row, std::nullopt);
            have_any = true;

            if (cfg.options.emit_spectra) {
                SpectrumRecord rec;
                rec.pump_power_w = p_w;
                rec.label = "noise_fit";
                rec.x_hz = pumped.freq_hz;
                rec.measured = norm.n_out;
                for (double w : spec.freq_offsets)
                    rec.fitted.push_back(
                        detected_noise_spectrum(kin, kex, baths.baths, 0.0, w));
                rep.spectra.push_back(std::move(rec));
            }
        }

        if (have_any) {
            rep.rows.push_back(std::move(row));
        } else {
            std::ostringstream ss;
            ss << "power point " << fmt_double(p_w) << " W skipped: incomplete trace set";
            rep.warnings.push_back(ss.str());
        }
    }
    return rep;
}

ChainCalibration run_calibrate(const ScenarioConfig& cfg,
                               const std::vector<RadiometerPoint>& points)
{
    if (!cfg.calibration) fail(Errc::bad_config, "calibrate: config has no calibration section");
    const CalibrationCfg& cal = *cfg.calibration;
    const AngularFrequency omega_e = AngularFrequency::from_hz(cal.omega_e_hz);

    RadiometerFit fit = fit_radiometer(points, omega_e, cal.bw_hz);
    const ChainCorrection corr = chain_correction(fit.beta4_db, fit.n_add,
                                                  PowerDb::from_db(cal.extra_loss_db));

    double beta3_db = 0.0;
    bool beta3_known = false;
    if (cal.through_level_db) {
        beta3_db = *cal.through_level_db - corr.beta4.db();
        beta3_known = true;
    }

    double beta1_db = 0.0, beta2_db = 0.0;
    bool beta1_known = false, beta2_known = false;
    const double w_o = cfg.device.opt_signal().omega0().rad_s();
    const double w_e = cfg.device.mw().omega0().rad_s();
    if (cal.eta_tot && cal.p_in_o_w && cal.p_out_e_w) {
        const double beta1 = (*cal.p_out_e_w / *cal.p_in_o_w) * (w_o / w_e) /
                             (corr.beta4.linear() * *cal.eta_tot);
        beta1_db = db_from_linear(beta1);
        beta1_known = true;
    }
    if (cal.eta_tot && cal.p_in_e_w && cal.p_out_o_w && beta3_known) {
        const double beta2 = (*cal.p_out_o_w / *cal.p_in_e_w) * (w_e / w_o) /
                             (linear_from_db(beta3_db) * *cal.eta_tot);
        beta2_db = db_from_linear(beta2);
        beta2_known = true;
    }

    ChainCalibration out{
        .chain = CalibrationChain(PowerDb::from_db(beta1_db), PowerDb::from_db(beta2_db),
                                  PowerDb::from_db(beta3_db), corr.beta4, corr.n_sys),
        .beta1_known = beta1_known,
        .beta2_known = beta2_known,
        .beta3_known = beta3_known,
        .beta4_ci_db = fit.beta4_ci_db,
        .n_sys_ci = fit.n_add_ci * PowerDb::from_db(cal.extra_loss_db).linear(),
        .n_add = fit.n_add,
        .radiometer = fit,
    };
    return out;
}

Report run_sweep(const ScenarioConfig& cfg)
{
    Report rep;
    rep.tool_version = kVersion;
    rep.config_hash = cfg.config_hash;
    if (cfg.sweep_axes.empty()) fail(Errc::bad_config, "sweep: config has no sweep axes");

    // Cartesian product in the declared axis order; the power axis, when
    // present, is the innermost so C = 1 bracketing scans contiguous rows.
    std::vector<const SweepAxis*> axes;
    const SweepAxis* power_axis = nullptr;
    for (const auto& a : cfg.sweep_axes) {
        if (a.name == "p_p_w")
            power_axis = &a;
        else
            axes.push_back(&a);
    }
    std::vector<double> fallback_power{cfg.power_grid_w.empty() ? 0.0 : cfg.power_grid_w.back()};
    const std::vector<double>& powers = power_axis ? power_axis->values : fallback_power;

    SweepResult sweep;
    std::vector<std::size_t> counter(axes.size(), 0);
    bool done = false;
    while (!done) {
        // Apply the non-power overrides.
        double g0 = cfg.device.g0();
        double lambda_sq = cfg.device.lambda_sq();
        std::optional<double> kappa_e_hz_override, kappa_o_hz_override;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const double v = axes[i]->values[counter[i]];
            if (axes[i]->name == "g0_hz") g0 = consts::two_pi * v;
            else if (axes[i]->name == "lambda_sq") lambda_sq = v;
            else if (axes[i]->name == "kappa_e_hz") kappa_e_hz_override = v;
            else if (axes[i]->name == "kappa_o_hz") kappa_o_hz_override = v;
        }

        std::vector<SweepRow> group_rows;
        for (double p : powers) {
            ResonatorMode mw = kappa_e_hz_override
                                   ? ResonatorMode(cfg.device.mw().omega0(),
                                                   consts::two_pi * *kappa_e_hz_override -
                                                       cfg.device.mw().kappa_ex(),
                                                   cfg.device.mw().kappa_ex(),
                                                   cfg.device.mw().azimuthal_m())
                                   : cfg.mw_at_power(p);
            ResonatorMode opt = cfg.device.opt_signal();
            if (kappa_o_hz_override)
                opt = ResonatorMode(opt.omega0(),
                                    consts::two_pi * *kappa_o_hz_override - opt.kappa_ex(),
                                    opt.kappa_ex(), opt.azimuthal_m());
            DeviceParams dev(mw, cfg.device.opt_pump(), opt, g0, lambda_sq, cfg.device.fsr(),
                             cfg.device.fsr_tolerance_hz());

            SweepRow row;
            row.p_p_w = p;
            row.g0_hz = g0 / consts::two_pi;
            row.lambda_sq = lambda_sq;
            row.kappa_e_hz = mw.kappa() / consts::two_pi;
            row.kappa_o_hz = opt.kappa() / consts::two_pi;
            row.n_p = pump_photon_number(dev, p);
            row.cooperativity = cooperativity(dev, row.n_p);
            row.eta_tot = eta_total(mw.eta(), opt.eta(), lambda_sq, row.cooperativity);
            row.bandwidth_hz = bandwidth(opt.kappa(), mw.kappa()) / consts::two_pi;
            if (cfg.heating)
                row.heating_photons = heating_projection(cfg.heating->rate_ref_per_s,
                                                         cfg.heating->p_ref_w, p,
                                                         cfg.heating->tau_s);
            group_rows.push_back(row);
        }

        // First C = 1 crossing along the power axis of this group.
        if (!sweep.c_unity_power_w) {
            for (std::size_t i = 0; i + 1 < group_rows.size(); ++i) {
                const double c0 = group_rows[i].cooperativity;
                const double c1 = group_rows[i + 1].cooperativity;
                if ((c0 - 1.0) * (c1 - 1.0) <= 0.0 && c0 != c1) {
                    sweep.c_unity_power_w =
                        group_rows[i].p_p_w + (1.0 - c0) * (group_rows[i + 1].p_p_w -
                                                            group_rows[i].p_p_w) / (c1 - c0);
                    break;
                }
            }
        }
        sweep.rows.insert(sweep.rows.end(), group_rows.begin(), group_rows.end());

        done = true;
        for (std::size_t i = axes.size(); i-- > 0;) {
            if (++counter[i] < axes[i]->values.size()) {
                done = false;
                break;
            }
            counter[i] = 0;
        }
        if (axes.empty()) done = true;
    }
    rep.sweep = std::move(sweep);
    return rep;
}

} // namespace eoct

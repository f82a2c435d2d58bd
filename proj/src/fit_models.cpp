#include "fit_models.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace eoct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double median(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Median of the outer `frac` of bins on each side; the usual stand-in for the
// far-off-resonance level of a measured trace.
double outer_median(const std::vector<double>& v, double frac = 0.1)
{
    const std::size_t n = v.size();
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(frac * n));
    std::vector<double> outer;
    outer.insert(outer.end(), v.begin(), v.begin() + k);
    outer.insert(outer.end(), v.end() - k, v.end());
    return median(std::move(outer));
}

struct DipEstimate {
    double f0 = 0.0;
    double width = 0.0; // FWHM in the x units
    double floor = 1.0;
    double depth = 0.0; // fractional
};

DipEstimate estimate_dip(const std::vector<double>& f, const std::vector<double>& v)
{
    DipEstimate est;
    est.floor = outer_median(v);
    const auto it = std::min_element(v.begin(), v.end());
    const std::size_t imin = static_cast<std::size_t>(it - v.begin());
    est.f0 = f[imin];
    est.depth = est.floor > 0.0 ? std::clamp(1.0 - *it / est.floor, 0.0, 1.0) : 0.0;
    const double half = est.floor > 0.0 ? *it + 0.5 * (est.floor - *it) : *it;
    std::size_t l = imin, r = imin;
    while (l > 0 && v[l] < half) --l;
    while (r + 1 < v.size() && v[r] < half) ++r;
    est.width = std::max(f[r] - f[l], 2.0 * (f[1] - f[0]));
    return est;
}

} // namespace

ReflectionFit fit_microwave_reflection(const SpectrumTrace& trace, bool undercoupled)
{
    trace.validate();
    if (trace.kind != TraceKind::reflection_mw && trace.kind != TraceKind::reflection_opt)
        fail(Errc::invalid_input, "fit_microwave_reflection: expected a reflection trace");
    const auto& f = trace.freq_hz;
    const auto& v = trace.value;
    const DipEstimate est = estimate_dip(f, v);
    const double span = f.back() - f.front();

    // Parameters: (f0 Hz, kappa Hz ordinary, u = |k_in-k_ex|/k_e, scale).
    ModelSpec model;
    model.eval = [](std::span<const double> p, double x) {
        const double d = x - p[0];
        const double k2 = p[1] * p[1];
        const double d4 = 4.0 * d * d;
        return p[3] * (p[2] * p[2] * k2 + d4) / (k2 + d4);
    };
    model.names = {"f0_hz", "kappa_hz", "u", "scale"};
    model.lower = {f.front(), span * 1e-6, 0.0, est.floor * 1e-6};
    model.upper = {f.back(), span * 10.0, 1.0, est.floor * 1e6};

    FitData data;
    data.x = f;
    data.y = v;
    std::vector<double> init = {est.f0, est.width, std::sqrt(std::max(1.0 - est.depth, 0.0)),
                                std::max(est.floor, est.floor * 1e-3 + 1e-12)};
    for (std::size_t j = 0; j < init.size(); ++j)
        init[j] = std::clamp(init[j], model.lower[j], model.upper[j]);

    ReflectionFit out;
    out.raw = least_squares_fit(model, data, init);
    const double f0 = out.raw.params[0];
    const double k_hz = out.raw.params[1];
    const double u = out.raw.params[2];
    out.scale = out.raw.params[3];

    const double sgn = undercoupled ? 1.0 : -1.0;
    out.omega_e_rad_s = consts::two_pi * f0;
    out.kappa_in = consts::pi * k_hz * (1.0 + sgn * u);
    out.kappa_ex = consts::pi * k_hz * (1.0 - sgn * u);
    out.omega_e_ci = consts::two_pi * out.raw.ci95[0];

    // Delta method through (kappa, u) including their covariance.
    const double var_k = out.raw.cov(1, 1);
    const double var_u = out.raw.cov(2, 2);
    const double cov_ku = out.raw.cov(1, 2);
    const double a_in = consts::pi * (1.0 + sgn * u);
    const double b_in = sgn * consts::pi * k_hz;
    const double a_ex = consts::pi * (1.0 - sgn * u);
    const double b_ex = -sgn * consts::pi * k_hz;
    out.kappa_in_ci =
        1.96 * std::sqrt(std::max(a_in * a_in * var_k + b_in * b_in * var_u +
                                      2.0 * a_in * b_in * cov_ku, 0.0));
    out.kappa_ex_ci =
        1.96 * std::sqrt(std::max(a_ex * a_ex * var_k + b_ex * b_ex * var_u +
                                      2.0 * a_ex * b_ex * cov_ku, 0.0));

    std::size_t within = 0;
    for (double fi : f)
        if (std::abs(fi - f0) <= 0.5 * k_hz) ++within;
    out.under_resolved = within < 5 || span < 5.0 * k_hz;
    if (out.under_resolved)
        out.raw.warnings.push_back("linewidth under-resolved or trace span below 5 linewidths");
    return out;
}

OpticalTraceFit fit_optical_reflection(const SpectrumTrace& trace)
{
    trace.validate();
    const auto& f = trace.freq_hz;
    const auto& v = trace.value;
    const DipEstimate est = estimate_dip(f, v);
    const double span = f.back() - f.front();

    // Parameters: (f0 Hz, kappa Hz, dip fraction, scale).
    ModelSpec model;
    model.eval = [](std::span<const double> p, double x) {
        const double d = x - p[0];
        const double k2 = p[1] * p[1];
        return p[3] * (1.0 - p[2] * k2 / (k2 + 4.0 * d * d));
    };
    model.names = {"f0_hz", "kappa_hz", "dip", "scale"};
    model.lower = {f.front(), span * 1e-6, 0.0, est.floor * 1e-6};
    model.upper = {f.back(), span * 10.0, 1.0, est.floor * 1e6};

    FitData data;
    data.x = f;
    data.y = v;
    std::vector<double> init = {est.f0, est.width, est.depth, std::max(est.floor, 1e-12)};
    for (std::size_t j = 0; j < init.size(); ++j)
        init[j] = std::clamp(init[j], model.lower[j], model.upper[j]);

    OpticalTraceFit out;
    out.piezo_v = trace.piezo_v().value_or(0.0);
    out.raw = least_squares_fit(model, data, init);
    out.omega0_rad_s = consts::two_pi * out.raw.params[0];
    out.kappa_o = consts::two_pi * out.raw.params[1];
    out.kappa_o_ci = consts::two_pi * out.raw.ci95[1];
    out.dip = out.raw.params[2];
    out.dip_ci = out.raw.ci95[2];
    return out;
}

CouplingSweepFit fit_optical_coupling_sweep(const std::vector<SpectrumTrace>& traces)
{
    if (traces.size() < 5)
        fail(Errc::invalid_input, "fit_optical_coupling_sweep: need at least 5 voltage points");
    CouplingSweepFit out;
    for (const auto& t : traces) {
        if (t.kind != TraceKind::reflection_opt)
            fail(Errc::invalid_input, "fit_optical_coupling_sweep: expected reflection_opt traces");
        if (!t.piezo_v())
            fail(Errc::invalid_input, "fit_optical_coupling_sweep: trace missing piezo_v");
        out.per_trace.push_back(fit_optical_reflection(t));
    }
    std::sort(out.per_trace.begin(), out.per_trace.end(),
              [](const auto& a, const auto& b) { return a.piezo_v < b.piezo_v; });

    std::vector<double> volts, kappas;
    for (const auto& tf : out.per_trace) {
        volts.push_back(tf.piezo_v);
        kappas.push_back(tf.kappa_o);
    }
    const double k_min = *std::min_element(kappas.begin(), kappas.end());
    const double k_max = *std::max_element(kappas.begin(), kappas.end());

    if ((k_max - k_min) / k_max < 1e-6) {
        // No coupling variation at all: the offset is the mean, the
        // exponential part is indeterminate.
        out.kappa_in_o = std::accumulate(kappas.begin(), kappas.end(), 0.0) /
                         static_cast<double>(kappas.size());
        out.kappa_ex_v0 = 0.0;
        out.kappa_ex_v0_ci = kInf;
        out.decay_per_volt_ci = kInf;
        out.lambda_sq_ci = kInf;
        out.warnings.push_back("sweep shows no kappa variation; exponential part indeterminate");
        return out;
    }

    // kappa_o(V) = offset + amplitude * exp(rate * V).
    ModelSpec model;
    model.eval = [](std::span<const double> p, double x) {
        return p[0] + p[1] * std::exp(p[2] * x);
    };
    model.names = {"kappa_in", "kappa_ex_v0", "rate_per_v"};
    model.lower = {0.0, 0.0, -1e3};
    model.upper = {k_max, 100.0 * k_max, 1e3};

    double off0 = 0.9 * k_min;
    double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < volts.size(); ++i) {
        const double ly = std::log(std::max(kappas[i] - off0, 1e-6 * k_min));
        sx += volts[i];
        sy += ly;
        sxx += volts[i] * volts[i];
        sxy += volts[i] * ly;
    }
    const double nn = static_cast<double>(volts.size());
    const double rate0 = (nn * sxy - sx * sy) / std::max(nn * sxx - sx * sx, 1e-300);
    const double amp0 = std::exp((sy - rate0 * sx) / nn);

    FitData data;
    data.x = volts;
    data.y = kappas;
    std::vector<double> init = {off0, amp0, rate0};
    for (std::size_t j = 0; j < init.size(); ++j)
        init[j] = std::clamp(init[j], model.lower[j], model.upper[j]);
    FitResult expfit = least_squares_fit(model, data, init);
    if (!expfit.converged)
        out.warnings.push_back("exponential kappa(V) fit did not converge");

    out.kappa_in_o = expfit.params[0];
    out.kappa_in_o_ci = expfit.ci95[0];
    out.kappa_ex_v0 = expfit.params[1];
    out.kappa_ex_v0_ci = expfit.ci95[1];
    out.decay_per_volt = expfit.params[2];
    out.decay_per_volt_ci = expfit.ci95[2];

    // Mode match from the trace closest to critical coupling. With
    // dip = 4 k_ex L2 (k_o - L2 k_ex)/k_o^2, the branch with L2 k_ex < k_o/2
    // gives L2 = k_o (1 - sqrt(1 - dip)) / (2 k_ex).
    out.crossed_critical = k_max >= 2.0 * out.kappa_in_o && k_min <= 2.0 * out.kappa_in_o;
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t i = 0; i < out.per_trace.size(); ++i) {
        const double d = std::abs(out.per_trace[i].kappa_o - 2.0 * out.kappa_in_o);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    const OpticalTraceFit& crit = out.per_trace[best];
    auto lambda_from = [&](double k_o, double dip, double k_in) {
        const double k_ex = k_o - k_in;
        if (k_ex <= 0.0 || dip <= 0.0 || dip > 1.0) return 0.0;
        return k_o * (1.0 - std::sqrt(std::max(1.0 - dip, 0.0))) / (2.0 * k_ex);
    };
    out.lambda_sq = lambda_from(crit.kappa_o, crit.dip, out.kappa_in_o);

    // First-order propagation of the three inputs, treated as independent.
    const double l0 = out.lambda_sq;
    const double dk = std::max(crit.kappa_o * 1e-6, 1.0);
    const double dd = std::max(crit.dip * 1e-6, 1e-9);
    const double di = std::max(out.kappa_in_o * 1e-6, 1.0);
    const double gk = (lambda_from(crit.kappa_o + dk, crit.dip, out.kappa_in_o) - l0) / dk;
    const double gd = (lambda_from(crit.kappa_o, std::min(crit.dip + dd, 1.0), out.kappa_in_o) -
                       l0) / dd;
    const double gi = (lambda_from(crit.kappa_o, crit.dip, out.kappa_in_o + di) - l0) / di;
    const double sk = crit.kappa_o_ci / 1.96;
    const double sd = crit.dip_ci / 1.96;
    const double si = out.kappa_in_o_ci / 1.96;
    out.lambda_sq_ci =
        1.96 * std::sqrt(gk * gk * sk * sk + gd * gd * sd * sd + gi * gi * si * si);
    if (!out.crossed_critical) {
        out.lambda_sq_ci = std::max(out.lambda_sq_ci, 0.5 * std::max(out.lambda_sq, 0.1));
        out.warnings.push_back("sweep never crosses critical coupling; lambda_sq poorly "
                               "constrained");
    }
    return out;
}

BathsFit fit_noise_spectrum(const NoiseSpectrum& spectrum, double kappa_in_e,
                            double kappa_ex_e, double n_sys)
{
    const std::size_t n = spectrum.freq_offsets.size();
    if (n != spectrum.n_det.size() || n < 4)
        fail(Errc::invalid_input, "fit_noise_spectrum: bad spectrum");
    if (kappa_in_e <= 0.0 || kappa_ex_e <= 0.0)
        fail(Errc::invalid_input, "fit_noise_spectrum: kappas must be > 0");
    const double kappa = kappa_in_e + kappa_ex_e;
    const double span = spectrum.freq_offsets.back() - spectrum.freq_offsets.front();
    if (span < 3.0 * kappa)
        fail(Errc::invalid_input, "fit_noise_spectrum: spectrum must span >= 3 linewidths");

    // Model: L(w) N_b + (1 - L(w)) N_wg + n_sys, linear in both baths.
    ModelSpec model;
    model.eval = [kappa_in_e, kappa_ex_e, kappa, n_sys](std::span<const double> p, double w) {
        const double lor = 4.0 * kappa_in_e * kappa_ex_e / (kappa * kappa + 4.0 * w * w);
        return lor * (p[0] - p[1]) + p[1] + n_sys;
    };
    model.names = {"n_b", "n_wg"};
    model.lower = {-1e6, -1e6};
    model.upper = {1e12, 1e12};

    FitData data;
    data.x = spectrum.freq_offsets;
    data.y = spectrum.n_det;

    const double floor = outer_median(spectrum.n_det, 0.2) - n_sys;
    double center = spectrum.n_det[n / 2] - n_sys;
    const double lor0 = 4.0 * kappa_in_e * kappa_ex_e / (kappa * kappa);
    std::vector<double> init = {floor + (center - floor) / lor0, floor};

    BathsFit out;
    out.raw = least_squares_fit(model, data, init);
    double n_b = out.raw.params[0];
    double n_wg = out.raw.params[1];
    if (n_b < 0.0 || n_wg < 0.0) {
        out.clipped = true;
        out.raw.warnings.push_back("negative best-fit bath clipped to 0");
        n_b = std::max(n_b, 0.0);
        n_wg = std::max(n_wg, 0.0);
    }
    out.baths = NoiseBaths(n_wg, n_b);
    out.n_b_ci = out.raw.ci95[0];
    out.n_wg_ci = out.raw.ci95[1];
    return out;
}

RadiometerFit fit_radiometer(const std::vector<RadiometerPoint>& points,
                             AngularFrequency omega_e, double bw_hz)
{
    if (points.size() < 4)
        fail(Errc::invalid_input, "fit_radiometer: need at least 4 temperature points");
    if (bw_hz <= 0.0) fail(Errc::invalid_input, "fit_radiometer: bandwidth must be > 0");

    const double hw = consts::hbar * omega_e.rad_s();
    std::vector<double> q(points.size()), pw(points.size());
    double t_min = kInf;
    for (std::size_t i = 0; i < points.size(); ++i) {
        q[i] = 0.5 / std::tanh(hw / (2.0 * consts::k_b * points[i].t_load_k));
        pw[i] = points[i].psd_w;
        t_min = std::min(t_min, points[i].t_load_k);
    }

    // Linear prefit P = alpha q + gamma gives an exact starting point.
    const double nn = static_cast<double>(points.size());
    double sq = 0.0, sp = 0.0, sqq = 0.0, sqp = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sq += q[i];
        sp += pw[i];
        sqq += q[i] * q[i];
        sqp += q[i] * pw[i];
    }
    const double denom = nn * sqq - sq * sq;
    if (std::abs(denom) < 1e-300)
        fail(Errc::invalid_input, "fit_radiometer: degenerate temperature grid");
    const double alpha = (nn * sqp - sq * sp) / denom;
    const double gamma = (sp - alpha * sq) / nn;
    if (alpha <= 0.0) fail(Errc::invalid_input, "fit_radiometer: non-positive fitted gain");
    const double beta0_db = 10.0 * std::log10(alpha / (hw * bw_hz));
    const double n_add0 = gamma / alpha;

    ModelSpec model;
    model.eval = [hw, bw_hz](std::span<const double> p, double t) {
        const double q_t = 0.5 / std::tanh(hw / (2.0 * consts::k_b * t));
        return hw * std::pow(10.0, p[0] / 10.0) * bw_hz * (q_t + p[1]);
    };
    model.names = {"beta4_db", "n_add"};
    model.lower = {beta0_db - 60.0, -10.0};
    model.upper = {beta0_db + 60.0, 1e9};

    FitData data;
    data.x.reserve(points.size());
    data.y.reserve(points.size());
    for (const auto& pt : points) {
        data.x.push_back(pt.t_load_k);
        data.y.push_back(pt.psd_w);
    }
    std::vector<double> init = {beta0_db, std::clamp(n_add0, model.lower[1], model.upper[1])};

    RadiometerFit out;
    out.raw = least_squares_fit(model, data, init);
    out.beta4_db = PowerDb::from_db(out.raw.params[0]);
    out.n_add = out.raw.params[1];
    out.beta4_ci_db = out.raw.ci95[0];
    out.n_add_ci = out.raw.ci95[1];
    out.degenerate_span = t_min > hw / consts::k_b;
    if (out.degenerate_span)
        out.raw.warnings.push_back("temperature span entirely classical; gain and added noise "
                                   "are nearly degenerate");
    return out;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n != y.size() || n < 3)
        fail(Errc::invalid_input, "fit_power_law: need matching arrays with >= 3 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            fail(Errc::invalid_input, "fit_power_law: data must be strictly positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double nn = static_cast<double>(n);
    const double sxx_c = sxx - sx * sx / nn;
    if (std::abs(sxx_c) < 1e-300)
        fail(Errc::invalid_input, "fit_power_law: abscissa values are all equal");
    const double slope = (sxy - sx * sy / nn) / sxx_c;
    const double intercept = (sy - slope * sx) / nn;

    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        ssr += r * r;
    }
    const double dof = nn - 2.0;
    const double s2 = dof > 0.0 ? ssr / dof : kInf;
    const double var_slope = s2 / sxx_c;
    const double var_inter = s2 * (1.0 / nn + (sx / nn) * (sx / nn) / sxx_c);

    PowerLawFit out;
    out.exponent = slope;
    out.prefactor = std::exp(intercept);
    out.exponent_ci = 1.96 * std::sqrt(var_slope);
    out.prefactor_ci = out.prefactor * 1.96 * std::sqrt(var_inter);
    return out;
}

} // namespace eoct

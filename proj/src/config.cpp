#include "config.hpp"

#include "error.hpp"
#include "util.hpp"

#include <json.hpp>

#include <cmath>

namespace eoct {

namespace {

using nlohmann::json;

double need_num(const json& j, const std::string& key, const std::string& ctx)
{
    if (!j.contains(key))
        fail(Errc::bad_config, ctx + ": missing key '" + key + "'");
    if (!j.at(key).is_number())
        fail(Errc::bad_config, ctx + ": key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

double opt_num(const json& j, const std::string& key, double fallback)
{
    if (!j.contains(key)) return fallback;
    return j.at(key).get<double>();
}

std::vector<double> num_array(const json& j, const std::string& ctx)
{
    if (!j.is_array()) fail(Errc::bad_config, ctx + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) fail(Errc::bad_config, ctx + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

ResonatorMode parse_mode(const json& j, const std::string& ctx)
{
    return ResonatorMode(AngularFrequency::from_hz(need_num(j, "omega_hz", ctx)),
                         consts::two_pi * need_num(j, "kappa_in_hz", ctx),
                         consts::two_pi * need_num(j, "kappa_ex_hz", ctx),
                         static_cast<int>(opt_num(j, "azimuthal_m", 0)));
}

void check_strictly_increasing(const std::vector<double>& v, const std::string& ctx)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1]) fail(Errc::bad_config, ctx + ": values must be strictly increasing");
}

} // namespace

double KappaTable::kappa_e_rad_s_at(double p_w) const
{
    return consts::two_pi * linear_interp(pump_power_w, kappa_e_hz, p_w);
}

double Beta2Table::beta2_db_at(double p_w) const
{
    return linear_interp(pump_power_w, beta2_db, p_w);
}

double PowerLawModel::at(double p_w) const
{
    return prefactor * std::pow(p_w, exponent);
}

ResonatorMode ScenarioConfig::mw_at_power(double p_w) const
{
    const ResonatorMode& mw = device.mw();
    if (!kappa_e_table) return mw;
    const double kappa_e = kappa_e_table->kappa_e_rad_s_at(p_w);
    const double kappa_in = kappa_e - mw.kappa_ex();
    if (kappa_in <= 0.0)
        fail(Errc::bad_config, "kappa_e_table: interpolated kappa_e below fixed kappa_ex");
    return ResonatorMode(mw.omega0(), kappa_in, mw.kappa_ex(), mw.azimuthal_m());
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::bad_config, origin + ": JSON parse error: " + e.what());
    }
    try {
        if (!root.contains("device")) fail(Errc::bad_config, origin + ": missing 'device'");
        const json& jd = root.at("device");
        ResonatorMode mw = parse_mode(jd.at("mw"), origin + ".device.mw");
        ResonatorMode pump = parse_mode(jd.at("optical_pump"), origin + ".device.optical_pump");
        ResonatorMode sig = parse_mode(jd.at("optical_signal"), origin + ".device.optical_signal");
        if (!phase_match_check(pump.azimuthal_m(), mw.azimuthal_m(), sig.azimuthal_m()))
            fail(Errc::bad_config,
                 origin + ": azimuthal numbers violate m_o = m_p + m_e");
        DeviceParams device(
            mw, pump, sig,
            consts::two_pi * need_num(jd, "g0_hz", origin + ".device"),
            need_num(jd, "lambda_sq", origin + ".device"),
            AngularFrequency::from_hz(need_num(jd, "fsr_hz", origin + ".device")),
            opt_num(jd, "fsr_tolerance_hz", 1e6));

        ScenarioConfig cfg{.device = device};
        cfg.source_path = origin;
        cfg.config_hash = fnv1a64_hex(std::span<const char>(text.data(), text.size()));

        if (root.contains("chain")) {
            const json& jc = root.at("chain");
            cfg.chain = CalibrationChain(
                PowerDb::from_db(need_num(jc, "beta1_db", origin + ".chain")),
                PowerDb::from_db(need_num(jc, "beta2_db", origin + ".chain")),
                PowerDb::from_db(need_num(jc, "beta3_db", origin + ".chain")),
                PowerDb::from_db(need_num(jc, "beta4_db", origin + ".chain")),
                need_num(jc, "n_sys", origin + ".chain"));
        }
        if (root.contains("power_grid_w")) {
            cfg.power_grid_w = num_array(root.at("power_grid_w"), origin + ".power_grid_w");
            for (double p : cfg.power_grid_w)
                if (!(p > 0.0)) fail(Errc::bad_config, origin + ": power_grid_w must be > 0");
            check_strictly_increasing(cfg.power_grid_w, origin + ".power_grid_w");
        }
        if (root.contains("kappa_e_table")) {
            const json& jt = root.at("kappa_e_table");
            KappaTable t;
            t.pump_power_w = num_array(jt.at("pump_power_w"), origin + ".kappa_e_table");
            t.kappa_e_hz = num_array(jt.at("kappa_e_hz"), origin + ".kappa_e_table");
            if (t.pump_power_w.size() != t.kappa_e_hz.size() || t.pump_power_w.empty())
                fail(Errc::bad_config, origin + ": kappa_e_table columns must match");
            check_strictly_increasing(t.pump_power_w, origin + ".kappa_e_table.pump_power_w");
            cfg.kappa_e_table = std::move(t);
        }
        if (root.contains("beta2_table")) {
            const json& jt = root.at("beta2_table");
            Beta2Table t;
            t.pump_power_w = num_array(jt.at("pump_power_w"), origin + ".beta2_table");
            t.beta2_db = num_array(jt.at("beta2_db"), origin + ".beta2_table");
            if (t.pump_power_w.size() != t.beta2_db.size() || t.pump_power_w.empty())
                fail(Errc::bad_config, origin + ": beta2_table columns must match");
            check_strictly_increasing(t.pump_power_w, origin + ".beta2_table.pump_power_w");
            cfg.beta2_table = std::move(t);
        }
        auto parse_power_law = [&](const char* key) -> std::optional<PowerLawModel> {
            if (!root.contains("noise_model") || !root.at("noise_model").contains(key))
                return std::nullopt;
            const json& jm = root.at("noise_model").at(key);
            PowerLawModel m;
            m.prefactor = need_num(jm, "prefactor", origin + ".noise_model");
            m.exponent = need_num(jm, "exponent", origin + ".noise_model");
            return m;
        };
        cfg.n_wg_model = parse_power_law("n_wg");
        cfg.n_b_model = parse_power_law("n_b");
        if (root.contains("heating")) {
            const json& jh = root.at("heating");
            cfg.heating = HeatingCfg{need_num(jh, "rate_ref_per_s", origin + ".heating"),
                                     need_num(jh, "p_ref_w", origin + ".heating"),
                                     need_num(jh, "tau_s", origin + ".heating")};
        }
        if (root.contains("calibration")) {
            const json& jc = root.at("calibration");
            CalibrationCfg c;
            c.omega_e_hz = need_num(jc, "omega_e_hz", origin + ".calibration");
            c.bw_hz = need_num(jc, "bw_hz", origin + ".calibration");
            c.extra_loss_db = opt_num(jc, "extra_loss_db", 0.0);
            if (jc.contains("through_level_db"))
                c.through_level_db = jc.at("through_level_db").get<double>();
            if (jc.contains("eta_tot")) c.eta_tot = jc.at("eta_tot").get<double>();
            if (jc.contains("p_in_o_w")) c.p_in_o_w = jc.at("p_in_o_w").get<double>();
            if (jc.contains("p_out_e_w")) c.p_out_e_w = jc.at("p_out_e_w").get<double>();
            if (jc.contains("p_in_e_w")) c.p_in_e_w = jc.at("p_in_e_w").get<double>();
            if (jc.contains("p_out_o_w")) c.p_out_o_w = jc.at("p_out_o_w").get<double>();
            cfg.calibration = c;
        }
        if (root.contains("sweep")) {
            const json& js = root.at("sweep");
            const char* axis_names[] = {"p_p_w", "g0_hz", "lambda_sq", "kappa_e_hz",
                                        "kappa_o_hz"};
            for (const char* name : axis_names) {
                if (!js.contains(name)) continue;
                SweepAxis axis;
                axis.name = name;
                const json& ja = js.at(name);
                if (ja.is_array()) {
                    axis.values = num_array(ja, origin + ".sweep." + name);
                } else {
                    const double from = need_num(ja, "from", origin + ".sweep." + name);
                    const double to = need_num(ja, "to", origin + ".sweep." + name);
                    const int npts = static_cast<int>(need_num(ja, "points", origin));
                    const bool log = ja.contains("log") && ja.at("log").get<bool>();
                    if (npts < 1 || (log && (from <= 0.0 || to <= 0.0)))
                        fail(Errc::bad_config, origin + ": bad sweep axis " + name);
                    for (int i = 0; i < npts; ++i) {
                        const double t = npts == 1 ? 0.0
                                                   : static_cast<double>(i) /
                                                         static_cast<double>(npts - 1);
                        axis.values.push_back(log ? from * std::pow(to / from, t)
                                                  : from + t * (to - from));
                    }
                }
                if (axis.values.empty())
                    fail(Errc::bad_config, origin + ": empty sweep axis " + name);
                cfg.sweep_axes.push_back(std::move(axis));
            }
        }
        if (root.contains("options")) {
            const json& jo = root.at("options");
            cfg.options.baseline_poly_order =
                static_cast<int>(opt_num(jo, "baseline_poly_order", 0));
            if (cfg.options.baseline_poly_order < 0 || cfg.options.baseline_poly_order > 3)
                fail(Errc::bad_config, origin + ": baseline_poly_order must be in [0, 3]");
            cfg.options.off_resonance_factor = opt_num(jo, "off_resonance_factor", 20.0);
            if (jo.contains("emit_spectra"))
                cfg.options.emit_spectra = jo.at("emit_spectra").get<bool>();
        }
        if (root.contains("sideband_suppression_db"))
            cfg.sideband_suppression_db = root.at("sideband_suppression_db").get<double>();
        return cfg;
    } catch (const json::exception& e) {
        fail(Errc::bad_config, origin + ": " + e.what());
    }
}

ScenarioConfig load_config(const std::string& path)
{
    return parse_config_text(read_file(path), path);
}

} // namespace eoct

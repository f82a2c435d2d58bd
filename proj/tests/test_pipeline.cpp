#include "error.hpp"
#include "noise.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "trace.hpp"
#include "transduction.hpp"
#include "util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using namespace eoct;

namespace {

const char* kBaseConfig = R"json({
  "device": {
    "mw": {"omega_hz": 8.8e9, "kappa_in_hz": 6.7e6, "kappa_ex_hz": 3.7e6, "azimuthal_m": 1},
    "optical_pump": {"omega_hz": 193.5e12, "kappa_in_hz": 9.46e6, "kappa_ex_hz": 9.46e6,
                     "azimuthal_m": 20000},
    "optical_signal": {"omega_hz": 193508818000000.0, "kappa_in_hz": 9.46e6,
                       "kappa_ex_hz": 9.46e6, "azimuthal_m": 20001},
    "g0_hz": 40.0,
    "lambda_sq": 0.38,
    "fsr_hz": 8.818e9
  },
  "chain": {"beta1_db": -4.81, "beta2_db": 30.8, "beta3_db": -74.92, "beta4_db": 67.05,
            "n_sys": 12.74},
  "power_grid_w": [1e-7, 1e-6, 1e-5, 1.87e-5, 1e-4, 1.48e-3],
  "kappa_e_table": {"pump_power_w": [0.23e-6, 18.7e-6, 1.48e-3],
                    "kappa_e_hz": [10.45e6, 11.32e6, 14.85e6]},
  "heating": {"rate_ref_per_s": 1.1, "p_ref_w": 1.48e-3, "tau_s": 1e-7},
  "calibration": {"omega_e_hz": 8.8e9, "bw_hz": 5e5, "extra_loss_db": 0.6,
                  "through_level_db": -7.87,
                  "eta_tot": 3.16e-4, "p_in_o_w": 1e-6, "p_out_e_w": 0.0},
  "sweep": {"p_p_w": [1.48e-3, 0.1, 0.5, 0.8, 0.88, 1.0, 1.5]}
})json";

ScenarioConfig base_config()
{
    return parse_config_text(kBaseConfig, "test_pipeline");
}

std::string replace_once(std::string text, const std::string& from, const std::string& to)
{
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
    return text;
}

std::string temp_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "eoct_pipeline" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

// Synthetic four-trace set (two conversions plus both reflections) generated
// from the full conversion matrix with chain factors applied. `ripple`, when
// non-zero, multiplies the reflection traces with a smooth even baseline.
std::vector<SpectrumTrace> make_conversion_set(const ScenarioConfig& cfg, double p_w,
                                               const CalibrationChain& chain,
                                               double ripple = 0.0)
{
    const ResonatorMode mw = cfg.mw_at_power(p_w);
    const DeviceParams dev(mw, cfg.device.opt_pump(), cfg.device.opt_signal(),
                           cfg.device.g0(), cfg.device.lambda_sq(), cfg.device.fsr());
    const double g = std::sqrt(pump_photon_number(dev, p_w)) * dev.g0();
    const double kmax = std::max(dev.opt_signal().kappa(), mw.kappa());
    const double span = 90.0 * kmax / consts::two_pi; // +-45 linewidths
    const std::size_t n = 2001;

    const double b1 = chain.beta1.linear();
    const double b2 = chain.beta2.linear();
    const double b3 = chain.beta3.linear();
    const double b4 = chain.beta4.linear();

    auto grid_value = [&](std::size_t i, double center, double& f, double& w) {
        f = center - span / 2 +
            span * static_cast<double>(i) / static_cast<double>(n - 1);
        w = consts::two_pi * (f - center);
    };
    auto baseline = [&](std::size_t i) {
        if (ripple == 0.0) return 1.0;
        const double t = 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0;
        return 1.0 + ripple * (t * t - 1.0 / 3.0);
    };

    SpectrumTrace s_ee, s_oo, s_eo, s_oe;
    s_ee.kind = TraceKind::reflection_mw;
    s_oo.kind = TraceKind::reflection_opt;
    s_eo.kind = TraceKind::conversion;
    s_oe.kind = TraceKind::conversion;
    for (SpectrumTrace* t : {&s_ee, &s_oo, &s_eo, &s_oe})
        t->meta["pump_power_w"] = fmt_double(p_w);

    const double f_e = mw.omega0().hz();
    const double f_o = dev.opt_signal().omega0().hz();
    for (std::size_t i = 0; i < n; ++i) {
        double f, w;
        grid_value(i, f_e, f, w);
        const ConversionMatrix m = conversion_matrix(dev, g, w);
        s_ee.freq_hz.push_back(f);
        s_ee.value.push_back(b4 * b3 * m.ee() * baseline(i));
        s_eo.freq_hz.push_back(f);
        s_eo.value.push_back(b4 * b1 * m.eo());

        double fo, wo;
        grid_value(i, f_o, fo, wo);
        const ConversionMatrix mo = conversion_matrix(dev, g, wo);
        s_oo.freq_hz.push_back(fo);
        s_oo.value.push_back(b2 * b1 * mo.oo() * baseline(i));
        s_oe.freq_hz.push_back(fo);
        s_oe.value.push_back(b2 * b3 * mo.oe());
    }
    return {s_ee, s_oo, s_eo, s_oe};
}

// Pumped noise trace plus flat zero-pump reference on a shared grid.
std::pair<SpectrumTrace, SpectrumTrace> make_noise_pair(const ScenarioConfig& cfg, double p_w,
                                                        const NoiseBaths& baths)
{
    const ResonatorMode mw = cfg.mw_at_power(p_w);
    const double n_sys = cfg.chain->n_sys;
    SpectrumTrace pumped, reference;
    pumped.kind = reference.kind = TraceKind::noise_psd;
    pumped.meta["pump_power_w"] = fmt_double(p_w);
    pumped.meta["rbw_hz"] = "5e5";
    reference.meta["pump_power_w"] = "0";
    reference.meta["rbw_hz"] = "5e5";
    const double f_e = mw.omega0().hz();
    const std::size_t n = 601;
    const double span = 120e6;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = f_e - span / 2 +
                         span * static_cast<double>(i) / static_cast<double>(n - 1);
        const double w = consts::two_pi * (f - f_e);
        const double ref_level = 2.3e-10 * (1.0 + 0.02 * std::sin(0.05 * static_cast<double>(i)));
        const double n_det =
            detected_noise_spectrum(mw.kappa_in(), mw.kappa_ex(), baths, n_sys, w);
        pumped.freq_hz.push_back(f);
        pumped.value.push_back(ref_level * n_det / n_sys);
        reference.freq_hz.push_back(f);
        reference.value.push_back(ref_level);
    }
    return {pumped, reference};
}

} // namespace

TEST_CASE("simulate reproduces the efficiency operating point")
{
    const ScenarioConfig cfg = base_config();
    const Report rep = run_simulate(cfg);
    REQUIRE(rep.rows.size() == cfg.power_grid_w.size());

    const ReportRow& top = rep.rows.back();
    CHECK(top.pump_power_w == 1.48e-3);
    CHECK(top.eta_tot == doctest::Approx(3.16e-4).epsilon(0.02));
    CHECK(top.eta_int == doctest::Approx(0.0067).epsilon(0.02));
    CHECK(top.cooperativity == doctest::Approx(1.67e-3).epsilon(0.03));
    CHECK(top.bandwidth_hz == doctest::Approx(10.68e6).epsilon(0.005));

    // The 18.7 uW-adjacent grid point picks up the interpolated linewidth.
    const ReportRow& mid = rep.rows[3];
    CHECK(mid.pump_power_w == 1.87e-5);
    CHECK(mid.bandwidth_hz == doctest::Approx(9.0e6).epsilon(0.01));
}

TEST_CASE("simulate with no coupling gives zero efficiency columns")
{
    const std::string text = replace_once(kBaseConfig, "\"g0_hz\": 40.0", "\"g0_hz\": 0.0");
    const Report rep = run_simulate(parse_config_text(text, "test"));
    for (const auto& row : rep.rows) {
        CHECK(row.eta_tot == 0.0);
        CHECK(row.eta_int == 0.0);
        CHECK(row.cooperativity == 0.0);
    }
}

TEST_CASE("simulated efficiency is linear in power below 10 uW")
{
    // Fixed linewidth so only the cooperativity scaling enters.
    std::string text = replace_once(
        kBaseConfig,
        "\"kappa_e_table\": {\"pump_power_w\": [0.23e-6, 18.7e-6, 1.48e-3],\n"
        "                    \"kappa_e_hz\": [10.45e6, 11.32e6, 14.85e6]},\n",
        "");
    text = replace_once(text, "\"power_grid_w\": [1e-7, 1e-6, 1e-5, 1.87e-5, 1e-4, 1.48e-3]",
                        "\"power_grid_w\": [1e-8, 1e-7, 1e-6, 5e-6, 1e-5]");
    const Report rep = run_simulate(parse_config_text(text, "test"));
    const double slope0 = rep.rows[0].eta_tot / rep.rows[0].pump_power_w;
    for (const auto& row : rep.rows) {
        const double slope = row.eta_tot / row.pump_power_w;
        CHECK(std::abs(slope - slope0) / slope0 < 1e-3);
    }
}

TEST_CASE("simulate is deterministic")
{
    const ScenarioConfig cfg = base_config();
    CHECK(run_simulate(cfg).to_json_text() == run_simulate(cfg).to_json_text());
}

TEST_CASE("fit pipeline recovers the efficiency from a four-trace set")
{
    const ScenarioConfig cfg = base_config();
    const double p_w = 1.87e-5;
    const auto traces = make_conversion_set(cfg, p_w, *cfg.chain);
    const Report rep = run_fit(cfg, traces);
    REQUIRE(rep.rows.size() == 1);
    const ReportRow& row = rep.rows[0];

    const ResonatorMode mw = cfg.mw_at_power(p_w);
    const double g = std::sqrt(pump_photon_number(cfg.device, p_w)) * cfg.device.g0();
    const double c_true = 4.0 * g * g / (cfg.device.opt_signal().kappa() * mw.kappa());
    const double eta_true = eta_total(mw.eta(), cfg.device.opt_signal().eta(),
                                      cfg.device.lambda_sq(), c_true);
    CHECK(std::abs(row.eta_tot - eta_true) / eta_true < 0.01);
    CHECK(row.cooperativity == doctest::Approx(c_true).epsilon(0.01));
    CHECK(row.bandwidth_hz == doctest::Approx(9.0e6).epsilon(0.01));
}

TEST_CASE("fit pipeline is invariant under the calibration chain")
{
    const ScenarioConfig cfg = base_config();
    const double p_w = 1.87e-5;
    const CalibrationChain chain_a(PowerDb::from_db(-4.81), PowerDb::from_db(30.8),
                                   PowerDb::from_db(-74.92), PowerDb::from_db(67.05), 12.74);
    const CalibrationChain chain_b(PowerDb::from_db(12.0), PowerDb::from_db(-33.0),
                                   PowerDb::from_db(5.5), PowerDb::from_db(-8.25), 12.74);
    const Report a = run_fit(cfg, make_conversion_set(cfg, p_w, chain_a));
    const Report b = run_fit(cfg, make_conversion_set(cfg, p_w, chain_b));
    REQUIRE(a.rows.size() == 1);
    REQUIRE(b.rows.size() == 1);
    CHECK(std::abs(a.rows[0].eta_tot - b.rows[0].eta_tot) / a.rows[0].eta_tot < 1e-10);
}

TEST_CASE("baseline ripple division removes a smooth distortion")
{
    std::string text = kBaseConfig;
    text.insert(text.rfind('}'), R"(, "options": {"baseline_poly_order": 2})");
    const ScenarioConfig corrected = parse_config_text(text, "test");
    const ScenarioConfig plain = base_config();
    const double p_w = 1.87e-5;

    const ResonatorMode mw = plain.mw_at_power(p_w);
    const double g = std::sqrt(pump_photon_number(plain.device, p_w)) * plain.device.g0();
    const double c_true = 4.0 * g * g / (plain.device.opt_signal().kappa() * mw.kappa());
    const double eta_true = eta_total(mw.eta(), plain.device.opt_signal().eta(),
                                      plain.device.lambda_sq(), c_true);

    const auto rippled = make_conversion_set(plain, p_w, *plain.chain, 0.05);
    const double with_fix = run_fit(corrected, rippled).rows[0].eta_tot;
    const double without_fix = run_fit(plain, rippled).rows[0].eta_tot;
    CHECK(std::abs(with_fix - eta_true) / eta_true <
          std::abs(without_fix - eta_true) / eta_true);
    CHECK(std::abs(with_fix - eta_true) / eta_true < 0.005);
}

TEST_CASE("fit pipeline noise branch recovers the published pair")
{
    const ScenarioConfig cfg = base_config();
    const double p_w = 14.82e-6;
    const ResonatorMode mw = cfg.mw_at_power(p_w);
    const double amp = 4.0 * mw.kappa_in() * mw.kappa_ex() / (mw.kappa() * mw.kappa());
    const NoiseBaths baths(0.13, 0.13 + (1.01 - 0.13) / amp);
    const auto [pumped, reference] = make_noise_pair(cfg, p_w, baths);

    const Report rep = run_fit(cfg, {pumped, reference});
    REQUIRE(rep.rows.size() == 1);
    const ReportRow& row = rep.rows[0];
    CHECK(std::abs(row.n_wg - 0.13) <= std::max(row.n_wg_ci, 1e-4));
    CHECK(row.n_out == doctest::Approx(1.01).epsilon(0.005));
    CHECK(row.n_e == doctest::Approx(mode_occupancy(mw.eta(), baths)).epsilon(1e-3));
    CHECK(row.n_e >= std::min(row.n_wg, row.n_b));
    CHECK(row.n_e <= std::max(row.n_wg, row.n_b));
}

TEST_CASE("fit pipeline diagnostics")
{
    const ScenarioConfig cfg = base_config();
    SUBCASE("empty trace set gives an empty report with a warning")
    {
        const Report rep = run_fit(cfg, {});
        CHECK(rep.rows.empty());
        CHECK(!rep.warnings.empty());
    }
    SUBCASE("missing traces skip the power point with a diagnostic")
    {
        auto traces = make_conversion_set(cfg, 1.87e-5, *cfg.chain);
        traces.pop_back(); // drop one conversion trace
        const Report rep = run_fit(cfg, traces);
        CHECK(rep.rows.empty());
        REQUIRE(!rep.warnings.empty());
        CHECK(rep.warnings[0].find("skipped") != std::string::npos);
    }
    SUBCASE("noise traces without a reference are rejected")
    {
        const ResonatorMode mw = cfg.mw_at_power(1e-5);
        const auto [pumped, reference] = make_noise_pair(cfg, 1e-5, NoiseBaths(0.1, 0.5));
        CHECK_THROWS_AS(run_fit(cfg, {pumped}), Error);
    }
}

TEST_CASE("calibrate fits the radiometer sweep and derives the line factors")
{
    const ScenarioConfig base = base_config();
    // Close the loop: the configured p_out_e_w is what the generator chain
    // would actually produce for the configured input and efficiency.
    const double beta4_lin = linear_from_db(67.05);
    const double beta1_lin = linear_from_db(-4.81);
    const double w_e = base.device.mw().omega0().rad_s();
    const double w_o = base.device.opt_signal().omega0().rad_s();
    const double p_out_e = beta4_lin * 3.16e-4 * beta1_lin * 1e-6 * (w_e / w_o);
    const std::string text = replace_once(kBaseConfig, "\"p_out_e_w\": 0.0",
                                          "\"p_out_e_w\": " + fmt_double(p_out_e));
    const ScenarioConfig cfg = parse_config_text(text, "test");

    std::vector<RadiometerPoint> points;
    const AngularFrequency we = AngularFrequency::from_hz(8.8e9);
    for (int i = 0; i < 25; ++i) {
        const double t = 0.0215 * std::pow(1.8 / 0.0215, i / 24.0);
        points.emplace_back(t, radiometer_psd(t, we, PowerDb::from_db(67.65), 10.66, 5e5));
    }
    const ChainCalibration cal = run_calibrate(cfg, points);
    CHECK(cal.chain.beta4.db() == doctest::Approx(67.05).epsilon(1e-9));
    CHECK(cal.chain.n_sys == doctest::Approx(12.7393).epsilon(1e-4));
    CHECK(std::abs(cal.chain.n_sys - 12.74) < 0.36);
    CHECK(cal.n_add == doctest::Approx(10.66).epsilon(1e-8));
    REQUIRE(cal.beta3_known);
    CHECK(cal.chain.beta3.db() == doctest::Approx(-74.92).epsilon(1e-9));
    REQUIRE(cal.beta1_known);
    CHECK(cal.chain.beta1.db() == doctest::Approx(-4.81).epsilon(1e-9));
}

TEST_CASE("sweep locates the unit-cooperativity power")
{
    const ScenarioConfig cfg = base_config();
    const Report rep = run_sweep(cfg);
    REQUIRE(rep.sweep.has_value());
    REQUIRE(rep.sweep->c_unity_power_w.has_value());
    CHECK(*rep.sweep->c_unity_power_w == doctest::Approx(0.89).epsilon(0.05));

    // Consistency with the single-point forward model.
    const SimPoint pt = evaluate_point(cfg, 1.48e-3);
    const SweepRow& first = rep.sweep->rows[0];
    CHECK(first.p_p_w == 1.48e-3);
    CHECK(first.cooperativity == doctest::Approx(pt.cooperativity).epsilon(1e-12));
    CHECK(first.eta_tot == doctest::Approx(pt.eta_tot).epsilon(1e-12));
    CHECK(first.bandwidth_hz == doctest::Approx(pt.bandwidth_hz).epsilon(1e-12));

    // Heating column at 1 W, 100 ns.
    const auto it = std::find_if(rep.sweep->rows.begin(), rep.sweep->rows.end(),
                                 [](const SweepRow& r) { return r.p_p_w == 1.0; });
    REQUIRE(it != rep.sweep->rows.end());
    CHECK(it->heating_photons == doctest::Approx(7.4324e-5).epsilon(1e-3));
    CHECK(it->heating_photons < 1e-4);
    CHECK(it->cooperativity > 1.0);
}

TEST_CASE("sweep of a single point matches the simulate row")
{
    const std::string text =
        replace_once(kBaseConfig, "\"p_p_w\": [1.48e-3, 0.1, 0.5, 0.8, 0.88, 1.0, 1.5]",
                     "\"p_p_w\": [1.48e-3]");
    const ScenarioConfig cfg = parse_config_text(text, "test");
    const Report swept = run_sweep(cfg);
    const Report simulated = run_simulate(cfg);
    REQUIRE(swept.sweep.has_value());
    REQUIRE(swept.sweep->rows.size() == 1);
    const SweepRow& srow = swept.sweep->rows[0];
    const ReportRow& mrow = simulated.rows.back();
    CHECK(srow.cooperativity == doctest::Approx(mrow.cooperativity).epsilon(1e-12));
    CHECK(srow.eta_tot == doctest::Approx(mrow.eta_tot).epsilon(1e-12));
    CHECK(srow.bandwidth_hz == doctest::Approx(mrow.bandwidth_hz).epsilon(1e-12));
}

TEST_CASE("report outputs are deterministic and carry the plot files")
{
    const ScenarioConfig cfg = base_config();
    const Report rep = run_simulate(cfg);
    const std::string dir_a = temp_dir("out_a");
    const std::string dir_b = temp_dir("out_b");
    write_report_outputs(rep, dir_a);
    write_report_outputs(rep, dir_b);
    for (const char* name : {"report.json", "summary.txt", "efficiency_vs_power.tsv",
                             "noise_vs_power.tsv"}) {
        const std::string a = read_file(dir_a + "/" + std::string(name));
        const std::string b = read_file(dir_b + "/" + std::string(name));
        CHECK(a == b);
        CHECK(!a.empty());
    }
    const std::string noise_tsv = read_file(dir_a + "/noise_vs_power.tsv");
    CHECK(noise_tsv.rfind("pump_power_w\tn_wg\tn_out\tn_b\tn_e\n", 0) == 0);

    // Round trip through JSON preserves the rows.
    const Report back = Report::from_json_text(rep.to_json_text());
    REQUIRE(back.rows.size() == rep.rows.size());
    CHECK(back.rows.back().eta_tot == rep.rows.back().eta_tot);
    CHECK(back.config_hash == rep.config_hash);
}

TEST_CASE("empty reports write header-only files")
{
    Report rep;
    rep.tool_version = tool_version();
    rep.config_hash = "deadbeef";
    const std::string dir = temp_dir("empty");
    write_report_outputs(rep, dir);
    CHECK(read_file(dir + "/efficiency_vs_power.tsv") ==
          "pump_power_w\teta_tot\teta_int\tbandwidth_hz\n");
    CHECK(read_file(dir + "/noise_vs_power.tsv") == "pump_power_w\tn_wg\tn_out\tn_b\tn_e\n");
}

TEST_CASE("report emission enforces the row invariants")
{
    Report rep;
    rep.tool_version = tool_version();
    ReportRow bad;
    bad.pump_power_w = 1e-6;
    bad.n_wg = 0.1;
    bad.n_b = 0.2;
    bad.n_e = 0.5; // outside the bath extrema
    rep.rows.push_back(bad);
    const std::string dir = temp_dir("invariant");
    try {
        write_report_outputs(rep, dir);
        FAIL("expected an invariant violation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::internal);
    }
}

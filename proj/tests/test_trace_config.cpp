#include "config.hpp"
#include "error.hpp"
#include "trace.hpp"
#include "util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace eoct;

namespace {

std::string temp_path(const std::string& name)
{
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() / "eoct_tests";
    std::filesystem::create_directories(dir);
    return (dir / (std::to_string(counter++) + "_" + name)).string();
}

void write_text(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

const char* kValidConfig = R"json({
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
  "power_grid_w": [1e-7, 1e-6, 1e-5, 1e-4, 1.48e-3],
  "kappa_e_table": {"pump_power_w": [0.23e-6, 18.7e-6, 1.48e-3],
                    "kappa_e_hz": [10.45e6, 11.32e6, 14.85e6]}
})json";

} // namespace

TEST_CASE("trace save/load round trip")
{
    SpectrumTrace t;
    t.kind = TraceKind::conversion;
    t.meta["pump_power_w"] = "1.48e-3";
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> vdist(1e-8, 10.0);
    double f = 8.7e9;
    for (int i = 0; i < 200; ++i) {
        f += 1e5 * (1.0 + 0.5 * vdist(rng));
        t.freq_hz.push_back(f);
        t.value.push_back(vdist(rng));
    }
    const std::string path = temp_path("roundtrip.txt");
    save_trace(t, path);
    const SpectrumTrace back = load_trace(path);
    CHECK(back.kind == TraceKind::conversion);
    CHECK(back.pump_power_w() == doctest::Approx(1.48e-3).epsilon(1e-15));
    REQUIRE(back.freq_hz.size() == t.freq_hz.size());
    for (std::size_t i = 0; i < t.freq_hz.size(); ++i) {
        CHECK(std::abs(back.freq_hz[i] - t.freq_hz[i]) <= 1e-12 * t.freq_hz[i]);
        CHECK(std::abs(back.value[i] - t.value[i]) <= 1e-12 * t.value[i]);
    }
}

TEST_CASE("trace header parsing and validation errors carry distinct codes")
{
    SUBCASE("well-formed file with unit scaling")
    {
        const std::string path = temp_path("good.txt");
        write_text(path, "# kind: reflection_mw\n# unit_x: MHz\n# unit_y: dimensionless\n"
                         "8799.0 0.5\n8800.0 0.1\n8801.0 0.5\n");
        const SpectrumTrace t = load_trace(path);
        CHECK(t.freq_hz[0] == doctest::Approx(8.799e9).epsilon(1e-12));
    }
    SUBCASE("descending frequency")
    {
        const std::string path = temp_path("desc.txt");
        write_text(path, "# kind: reflection_mw\n8.801e9 0.5\n8.800e9 0.1\n");
        try {
            load_trace(path);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::non_monotone_freq);
        }
    }
    SUBCASE("header line without a colon")
    {
        const std::string path = temp_path("badheader.txt");
        write_text(path, "# kind reflection_mw\n8.8e9 0.5\n8.9e9 0.1\n");
        try {
            load_trace(path);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::malformed_header);
        }
    }
    SUBCASE("unknown header key")
    {
        const std::string path = temp_path("unknownkey.txt");
        write_text(path, "# kind: reflection_mw\n# flavor: vanilla\n8.8e9 0.5\n8.9e9 0.1\n");
        try {
            load_trace(path);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::malformed_header);
        }
    }
    SUBCASE("noise trace without resolution bandwidth")
    {
        const std::string path = temp_path("norbw.txt");
        write_text(path, "# kind: noise_psd\n# unit_y: W\n8.8e9 1e-10\n8.9e9 1e-10\n");
        try {
            load_trace(path);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::unit_mismatch);
        }
    }
    SUBCASE("wrong unit for a reflection trace")
    {
        const std::string path = temp_path("badunit.txt");
        write_text(path, "# kind: reflection_mw\n# unit_y: W\n8.8e9 0.5\n8.9e9 0.1\n");
        try {
            load_trace(path);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::unit_mismatch);
        }
    }
    SUBCASE("missing file")
    {
        try {
            load_trace(temp_path("missing.txt"));
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::io);
        }
    }
}

TEST_CASE("radiometer file loader")
{
    const std::string path = temp_path("radiometer.txt");
    write_text(path, "# kind: radiometer\n# unit_x: K\n# unit_y: W\n"
                     "0.0215 1.8e-10\n0.4 2.4e-10\n1.8 5.0e-10\n");
    const auto pts = load_radiometer_points(path);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].t_load_k == 0.0215);
    CHECK(pts[2].psd_w == 5.0e-10);

    const std::string bad = temp_path("notradio.txt");
    write_text(bad, "# kind: reflection_mw\n0.02 1e-10\n0.4 2e-10\n");
    CHECK_THROWS_AS(load_radiometer_points(bad), Error);
}

TEST_CASE("scenario config round trip")
{
    const ScenarioConfig cfg = parse_config_text(kValidConfig, "test");
    CHECK(cfg.device.mw().kappa_in() == doctest::Approx(consts::two_pi * 6.7e6).epsilon(1e-12));
    CHECK(cfg.device.lambda_sq() == 0.38);
    CHECK(cfg.chain.has_value());
    CHECK(cfg.chain->n_sys == 12.74);
    CHECK(cfg.power_grid_w.size() == 5);
    REQUIRE(cfg.kappa_e_table.has_value());

    // Interpolation hits the anchors exactly and clamps outside.
    CHECK(cfg.kappa_e_table->kappa_e_rad_s_at(1.48e-3) ==
          doctest::Approx(consts::two_pi * 14.85e6).epsilon(1e-12));
    CHECK(cfg.kappa_e_table->kappa_e_rad_s_at(1.0) ==
          doctest::Approx(consts::two_pi * 14.85e6).epsilon(1e-12));
    CHECK(cfg.kappa_e_table->kappa_e_rad_s_at(1e-9) ==
          doctest::Approx(consts::two_pi * 10.45e6).epsilon(1e-12));
    const double mid = cfg.kappa_e_table->kappa_e_rad_s_at(0.5 * (0.23e-6 + 18.7e-6));
    CHECK(mid > consts::two_pi * 10.45e6);
    CHECK(mid < consts::two_pi * 11.32e6);

    // The per-power microwave mode keeps kappa_ex fixed.
    const ResonatorMode mw_hi = cfg.mw_at_power(1.48e-3);
    CHECK(mw_hi.kappa_ex() == cfg.device.mw().kappa_ex());
    CHECK(mw_hi.kappa() == doctest::Approx(consts::two_pi * 14.85e6).epsilon(1e-12));
}

TEST_CASE("scenario config rejects bad documents")
{
    CHECK_THROWS_AS(parse_config_text("{not json", "test"), Error);
    CHECK_THROWS_AS(parse_config_text("{}", "test"), Error);

    std::string bad_lambda = kValidConfig;
    const auto pos = bad_lambda.find("0.38");
    bad_lambda.replace(pos, 4, "1.38");
    CHECK_THROWS_AS(parse_config_text(bad_lambda, "test"), Error);

    std::string bad_m = kValidConfig;
    const auto mpos = bad_m.find("20001");
    bad_m.replace(mpos, 5, "20007");
    CHECK_THROWS_AS(parse_config_text(bad_m, "test"), Error);

    std::string bad_fsr = kValidConfig;
    const auto fpos = bad_fsr.find("193508818000000.0");
    bad_fsr.replace(fpos, 17, "193508918000000.0"); // 100 MHz off
    CHECK_THROWS_AS(parse_config_text(bad_fsr, "test"), Error);
}

TEST_CASE("config hash is a stable digest of the source text")
{
    const ScenarioConfig a = parse_config_text(kValidConfig, "a");
    const ScenarioConfig b = parse_config_text(kValidConfig, "b");
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.config_hash.size() == 16);
    std::string other = kValidConfig;
    other.replace(other.find("0.38"), 4, "0.39");
    CHECK(parse_config_text(other, "c").config_hash != a.config_hash);
}

TEST_CASE("formatting round-trips doubles exactly")
{
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> expo(-30.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = std::copysign(std::pow(10.0, expo(rng)), expo(rng));
        const double back = std::strtod(fmt_double(x).c_str(), nullptr);
        CHECK(back == x);
    }
    CHECK(fmt_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("atomic write leaves no partial files behind")
{
    const std::string path = temp_path("atomic.txt");
    atomic_write_file(path, "hello\n");
    CHECK(read_file(path) == "hello\n");
    atomic_write_file(path, "world\n");
    CHECK(read_file(path) == "world\n");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}

#include "report.hpp"

#include "error.hpp"
#include "util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

namespace eoct {

namespace {

using nlohmann::json;

json num_or_null(double v)
{
    if (std::isnan(v)) return nullptr;
    return v;
}

double num_from(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null()) return ReportRow::nan_value();
    return j.at(key).get<double>();
}

std::string tsv_cell(double v)
{
    return fmt_double(v);
}

} // namespace

double ReportRow::nan_value()
{
    return std::numeric_limits<double>::quiet_NaN();
}

std::string Report::to_json_text() const
{
    json j;
    j["tool_version"] = tool_version;
    j["config_hash"] = config_hash;
    if (sideband_suppression_db) j["sideband_suppression_db"] = *sideband_suppression_db;
    j["inputs"] = json::array();
    for (const auto& in : inputs) j["inputs"].push_back({{"path", in.path}, {"digest", in.digest}});
    j["warnings"] = warnings;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json row;
        row["pump_power_w"] = r.pump_power_w;
        row["n_p"] = num_or_null(r.n_p);
        row["cooperativity"] = num_or_null(r.cooperativity);
        row["eta_tot"] = num_or_null(r.eta_tot);
        row["eta_int"] = num_or_null(r.eta_int);
        row["bandwidth_hz"] = num_or_null(r.bandwidth_hz);
        row["n_wg"] = num_or_null(r.n_wg);
        row["n_b"] = num_or_null(r.n_b);
        row["n_e"] = num_or_null(r.n_e);
        row["n_out"] = num_or_null(r.n_out);
        row["eta_tot_ci"] = num_or_null(r.eta_tot_ci);
        row["n_wg_ci"] = num_or_null(r.n_wg_ci);
        row["n_b_ci"] = num_or_null(r.n_b_ci);
        row["notes"] = r.notes;
        j["rows"].push_back(std::move(row));
    }
    if (sweep) {
        json js;
        js["c_unity_power_w"] =
            sweep->c_unity_power_w ? json(*sweep->c_unity_power_w) : json(nullptr);
        js["rows"] = json::array();
        for (const auto& r : sweep->rows) {
            js["rows"].push_back({{"p_p_w", r.p_p_w},
                                  {"g0_hz", r.g0_hz},
                                  {"lambda_sq", r.lambda_sq},
                                  {"kappa_e_hz", r.kappa_e_hz},
                                  {"kappa_o_hz", r.kappa_o_hz},
                                  {"n_p", r.n_p},
                                  {"cooperativity", r.cooperativity},
                                  {"eta_tot", r.eta_tot},
                                  {"bandwidth_hz", r.bandwidth_hz},
                                  {"heating_photons", num_or_null(r.heating_photons)}});
        }
        j["sweep"] = std::move(js);
    }
    if (!spectra.empty()) {
        j["spectra"] = json::array();
        for (const auto& s : spectra) {
            j["spectra"].push_back({{"pump_power_w", s.pump_power_w},
                                    {"label", s.label},
                                    {"x_hz", s.x_hz},
                                    {"measured", s.measured},
                                    {"fitted", s.fitted}});
        }
    }
    return j.dump(2) + "\n";
}

Report Report::from_json_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::invalid_input, std::string("report: JSON parse error: ") + e.what());
    }
    Report rep;
    try {
        rep.tool_version = j.value("tool_version", std::string());
        rep.config_hash = j.value("config_hash", std::string());
        if (j.contains("sideband_suppression_db") && !j.at("sideband_suppression_db").is_null())
            rep.sideband_suppression_db = j.at("sideband_suppression_db").get<double>();
        if (j.contains("inputs"))
            for (const auto& in : j.at("inputs"))
                rep.inputs.push_back({in.value("path", std::string()),
                                      in.value("digest", std::string())});
        if (j.contains("warnings"))
            rep.warnings = j.at("warnings").get<std::vector<std::string>>();
        if (j.contains("rows")) {
            for (const auto& row : j.at("rows")) {
                ReportRow r;
                r.pump_power_w = row.value("pump_power_w", 0.0);
                r.n_p = num_from(row, "n_p");
                r.cooperativity = num_from(row, "cooperativity");
                r.eta_tot = num_from(row, "eta_tot");
                r.eta_int = num_from(row, "eta_int");
                r.bandwidth_hz = num_from(row, "bandwidth_hz");
                r.n_wg = num_from(row, "n_wg");
                r.n_b = num_from(row, "n_b");
                r.n_e = num_from(row, "n_e");
                r.n_out = num_from(row, "n_out");
                r.eta_tot_ci = num_from(row, "eta_tot_ci");
                r.n_wg_ci = num_from(row, "n_wg_ci");
                r.n_b_ci = num_from(row, "n_b_ci");
                if (row.contains("notes"))
                    r.notes = row.at("notes").get<std::vector<std::string>>();
                rep.rows.push_back(std::move(r));
            }
        }
        if (j.contains("sweep") && !j.at("sweep").is_null()) {
            SweepResult sw;
            const json& js = j.at("sweep");
            if (js.contains("c_unity_power_w") && !js.at("c_unity_power_w").is_null())
                sw.c_unity_power_w = js.at("c_unity_power_w").get<double>();
            if (js.contains("rows")) {
                for (const auto& row : js.at("rows")) {
                    SweepRow r;
                    r.p_p_w = row.value("p_p_w", 0.0);
                    r.g0_hz = row.value("g0_hz", 0.0);
                    r.lambda_sq = row.value("lambda_sq", 0.0);
                    r.kappa_e_hz = row.value("kappa_e_hz", 0.0);
                    r.kappa_o_hz = row.value("kappa_o_hz", 0.0);
                    r.n_p = row.value("n_p", 0.0);
                    r.cooperativity = row.value("cooperativity", 0.0);
                    r.eta_tot = row.value("eta_tot", 0.0);
                    r.bandwidth_hz = row.value("bandwidth_hz", 0.0);
                    r.heating_photons = num_from(row, "heating_photons");
                    sw.rows.push_back(r);
                }
            }
            rep.sweep = std::move(sw);
        }
        if (j.contains("spectra")) {
            for (const auto& sj : j.at("spectra")) {
                SpectrumRecord s;
                s.pump_power_w = sj.value("pump_power_w", 0.0);
                s.label = sj.value("label", std::string());
                s.x_hz = sj.at("x_hz").get<std::vector<double>>();
                s.measured = sj.at("measured").get<std::vector<double>>();
                s.fitted = sj.at("fitted").get<std::vector<double>>();
                rep.spectra.push_back(std::move(s));
            }
        }
    } catch (const json::exception& e) {
        fail(Errc::invalid_input, std::string("report: ") + e.what());
    }
    return rep;
}

void check_row_invariants(const ReportRow& row, std::optional<double> eta_ceiling)
{
    constexpr double kSlack = 1.0 + 1e-9;
    if (!std::isnan(row.eta_tot) && eta_ceiling && row.eta_tot > *eta_ceiling * kSlack)
        fail(Errc::internal, "report row violates eta_tot <= eta_e eta_o lambda_sq");
    if (!std::isnan(row.n_e) && !std::isnan(row.n_wg) && !std::isnan(row.n_b)) {
        const double lo = std::min(row.n_wg, row.n_b);
        const double hi = std::max(row.n_wg, row.n_b);
        const double slack = 1e-9 * std::max(1.0, hi);
        if (row.n_e < lo - slack || row.n_e > hi + slack)
            fail(Errc::internal, "report row violates bath-extrema bound on N_e");
    }
}

void write_report_outputs(const Report& report, const std::string& out_dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail(Errc::io, "cannot create output directory " + out_dir);

    for (const auto& row : report.rows) check_row_invariants(row, std::nullopt);

    atomic_write_file(out_dir + "/report.json", report.to_json_text());

    std::string eff = "pump_power_w\teta_tot\teta_int\tbandwidth_hz\n";
    std::string noise = "pump_power_w\tn_wg\tn_out\tn_b\tn_e\n";
    for (const auto& r : report.rows) {
        eff += tsv_cell(r.pump_power_w) + "\t" + tsv_cell(r.eta_tot) + "\t" +
               tsv_cell(r.eta_int) + "\t" + tsv_cell(r.bandwidth_hz) + "\n";
        noise += tsv_cell(r.pump_power_w) + "\t" + tsv_cell(r.n_wg) + "\t" +
                 tsv_cell(r.n_out) + "\t" + tsv_cell(r.n_b) + "\t" + tsv_cell(r.n_e) + "\n";
    }
    atomic_write_file(out_dir + "/efficiency_vs_power.tsv", eff);
    atomic_write_file(out_dir + "/noise_vs_power.tsv", noise);

    if (report.sweep) {
        std::string sw = "p_p_w\tg0_hz\tlambda_sq\tkappa_e_hz\tkappa_o_hz\tn_p\tcooperativity"
                         "\teta_tot\tbandwidth_hz\theating_photons\n";
        for (const auto& r : report.sweep->rows) {
            sw += tsv_cell(r.p_p_w) + "\t" + tsv_cell(r.g0_hz) + "\t" +
                  tsv_cell(r.lambda_sq) + "\t" + tsv_cell(r.kappa_e_hz) + "\t" +
                  tsv_cell(r.kappa_o_hz) + "\t" + tsv_cell(r.n_p) + "\t" +
                  tsv_cell(r.cooperativity) + "\t" + tsv_cell(r.eta_tot) + "\t" +
                  tsv_cell(r.bandwidth_hz) + "\t" + tsv_cell(r.heating_photons) + "\n";
        }
        atomic_write_file(out_dir + "/sweep.tsv", sw);
    }

    if (!report.spectra.empty()) {
        std::string sp = "pump_power_w\tlabel\tx_hz\tmeasured\tfitted\n";
        for (const auto& s : report.spectra)
            for (std::size_t i = 0; i < s.x_hz.size(); ++i)
                sp += tsv_cell(s.pump_power_w) + "\t" + s.label + "\t" + tsv_cell(s.x_hz[i]) +
                      "\t" + tsv_cell(s.measured[i]) + "\t" + tsv_cell(s.fitted[i]) + "\n";
        atomic_write_file(out_dir + "/spectra.tsv", sp);
    }

    std::string sum;
    sum += "eoct report (" + report.tool_version + ")\n";
    sum += "config_hash: " + report.config_hash + "\n";
    if (report.sideband_suppression_db)
        sum += "sideband_suppression_db: " + fmt_double(*report.sideband_suppression_db) + "\n";
    sum += "rows: " + std::to_string(report.rows.size()) + "\n";
    for (const auto& r : report.rows) {
        sum += "  P_p=" + fmt_double(r.pump_power_w) + " W";
        if (!std::isnan(r.eta_tot)) sum += "  eta_tot=" + fmt_double(r.eta_tot);
        if (!std::isnan(r.eta_int)) sum += "  eta_int=" + fmt_double(r.eta_int);
        if (!std::isnan(r.bandwidth_hz))
            sum += "  B=" + fmt_double(r.bandwidth_hz * 1e-6) + " MHz";
        if (!std::isnan(r.n_out)) sum += "  N_out=" + fmt_double(r.n_out);
        if (!std::isnan(r.n_wg)) sum += "  N_wg=" + fmt_double(r.n_wg);
        if (!std::isnan(r.n_e)) sum += "  N_e=" + fmt_double(r.n_e);
        for (const auto& note : r.notes) sum += "  [" + note + "]";
        sum += "\n";
    }
    if (report.sweep) {
        sum += "sweep rows: " + std::to_string(report.sweep->rows.size()) + "\n";
        if (report.sweep->c_unity_power_w)
            sum += "C = 1 at P_p = " + fmt_double(*report.sweep->c_unity_power_w) + " W\n";
    }
    for (const auto& w : report.warnings) sum += "warning: " + w + "\n";
    atomic_write_file(out_dir + "/summary.txt", sum);
}

} // namespace eoct

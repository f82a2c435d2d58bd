// Command-line front end for the eoct shared library. Everything of substance
// happens behind the C API; this file only parses arguments, expands globs and
// maps status codes to exit codes (0 ok, 2 input error, 3 fit failure, 4
// internal error).

#include <eoct/eoct.h>

#include <CLI11.hpp>

#include <glob.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "eoct_out";
    std::string traces_glob;
    bool verbose = false;
};

// The environment variable overrides the output directory only.
std::string resolve_out_dir(const std::string& flag_value)
{
    const char* env = std::getenv("EOCT_OUT_DIR");
    return env && *env ? std::string(env) : flag_value;
}

int fail_with(eoct_status st, const char* what)
{
    std::fprintf(stderr, "eoct: %s: %s\n", what, eoct_last_error());
    return eoct_exit_class(st);
}

std::vector<std::string> expand_glob(const std::string& pattern)
{
    std::vector<std::string> paths;
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), GLOB_TILDE, nullptr, &g);
    if (rc == 0) {
        for (size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
    }
    ::globfree(&g);
    return paths;
}

int write_and_report(eoct_report* rep, const std::string& out_dir, bool verbose)
{
    const eoct_status st = eoct_report_write_outputs(rep, out_dir.c_str());
    if (st != EOCT_OK) {
        eoct_report_free(rep);
        return fail_with(st, "writing outputs");
    }
    std::printf("wrote %s (%zu rows, %zu warnings)\n", out_dir.c_str(),
                eoct_report_row_count(rep), eoct_report_warning_count(rep));
    if (verbose) {
        std::ifstream sum(out_dir + "/summary.txt");
        std::cout << sum.rdbuf();
    }
    eoct_report_free(rep);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"eoct - electro-optic transducer modeling and analysis"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string report_path;
    std::string radiometer_path;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* opt = sub->add_option("--config", args.config_path, "scenario config (JSON)");
        if (need_config) opt->required();
        sub->add_option("--out", args.out_dir, "output directory (EOCT_OUT_DIR overrides)");
        sub->add_flag("--verbose", args.verbose, "print the summary to stdout");
    };

    CLI::App* sim = app.add_subcommand("simulate", "forward model over the power grid");
    add_common(sim, true);

    CLI::App* fit = app.add_subcommand("fit", "calibrated analysis of measured traces");
    add_common(fit, true);
    fit->add_option("--traces", args.traces_glob, "glob of trace files")->required();

    CLI::App* cal = app.add_subcommand("calibrate", "radiometric output-line calibration");
    add_common(cal, true);
    cal->add_option("radiometer", radiometer_path, "matched-load sweep file")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "design exploration over configured axes");
    add_common(sweep, true);

    CLI::App* report = app.add_subcommand("report", "re-emit outputs from a saved report");
    add_common(report, false);
    report->add_option("report_json", report_path, "report.json produced by a previous run")
        ->required();

    CLI11_PARSE(app, argc, argv);
    const std::string out_dir = resolve_out_dir(args.out_dir);

    eoct_config* cfg = nullptr;
    if (!args.config_path.empty()) {
        const eoct_status st = eoct_config_load(args.config_path.c_str(), &cfg);
        if (st != EOCT_OK) return fail_with(st, "loading config");
    }

    int rc = 0;
    if (sim->parsed()) {
        eoct_report* rep = nullptr;
        const eoct_status st = eoct_simulate(cfg, &rep);
        rc = st == EOCT_OK ? write_and_report(rep, out_dir, args.verbose)
                           : fail_with(st, "simulate");
    } else if (fit->parsed()) {
        const auto paths = expand_glob(args.traces_glob);
        std::vector<eoct_trace*> traces;
        eoct_status st = EOCT_OK;
        for (const auto& p : paths) {
            eoct_trace* t = nullptr;
            st = eoct_trace_load(p.c_str(), &t);
            if (st != EOCT_OK) {
                rc = fail_with(st, ("loading trace " + p).c_str());
                break;
            }
            traces.push_back(t);
        }
        if (st == EOCT_OK) {
            if (paths.empty())
                std::fprintf(stderr, "eoct: warning: no traces match '%s'\n",
                             args.traces_glob.c_str());
            eoct_report* rep = nullptr;
            st = eoct_fit(cfg, const_cast<const eoct_trace* const*>(traces.data()),
                          traces.size(), &rep);
            rc = st == EOCT_OK ? write_and_report(rep, out_dir, args.verbose)
                               : fail_with(st, "fit");
        }
        for (auto* t : traces) eoct_trace_free(t);
    } else if (cal->parsed()) {
        eoct_chain_calibration result{};
        const eoct_status st = eoct_calibrate(cfg, radiometer_path.c_str(), &result);
        if (st != EOCT_OK) {
            rc = fail_with(st, "calibrate");
        } else {
            std::printf("beta4 = %.4f dB (ci95 %.4f), n_sys = %.4f (ci95 %.4f), n_add = %.4f\n",
                        result.beta4_db, result.beta4_ci_db, result.n_sys, result.n_sys_ci,
                        result.n_add);
            if (result.beta3_valid) std::printf("beta3 = %.4f dB\n", result.beta3_db);
            if (result.beta1_valid) std::printf("beta1 = %.4f dB\n", result.beta1_db);
            if (result.beta2_valid) std::printf("beta2 = %.4f dB\n", result.beta2_db);
        }
    } else if (sweep->parsed()) {
        eoct_report* rep = nullptr;
        const eoct_status st = eoct_sweep(cfg, &rep);
        rc = st == EOCT_OK ? write_and_report(rep, out_dir, args.verbose)
                           : fail_with(st, "sweep");
    } else if (report->parsed()) {
        eoct_report* rep = nullptr;
        const eoct_status st = eoct_report_load(report_path.c_str(), &rep);
        rc = st == EOCT_OK ? write_and_report(rep, out_dir, args.verbose)
                           : fail_with(st, "loading report");
    }

    eoct_config_free(cfg);
    return rc;
}

#include "trace.hpp"

#include "error.hpp"
#include "util.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace eoct {

namespace {

const std::set<std::string> kKnownKeys = {"kind",        "unit_x", "unit_y", "rbw_hz",
                                          "pump_power_w", "piezo_v", "timestamp"};

double unit_x_factor(const std::string& unit, const std::string& path)
{
    if (unit == "Hz") return 1.0;
    if (unit == "kHz") return 1e3;
    if (unit == "MHz") return 1e6;
    if (unit == "GHz") return 1e9;
    fail(Errc::unit_mismatch, path + ": unknown unit_x '" + unit + "'");
}

bool parse_number(const std::string& s, double& out)
{
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && end != s.c_str();
}

struct HeaderBlock {
    std::map<std::string, std::string> kv;
    std::vector<std::pair<double, double>> rows;
};

HeaderBlock parse_columns_file(const std::string& path)
{
    const std::string content = read_file(path);
    HeaderBlock out;
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos)
                fail(Errc::malformed_header,
                     path + ":" + std::to_string(lineno) + ": header line without 'key: value'");
            std::string key = line.substr(1, colon - 1);
            std::string value = line.substr(colon + 1);
            auto strip = [](std::string& s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
            };
            strip(key);
            strip(value);
            if (key.empty() || value.empty())
                fail(Errc::malformed_header,
                     path + ":" + std::to_string(lineno) + ": empty header key or value");
            if (!kKnownKeys.count(key))
                fail(Errc::malformed_header,
                     path + ":" + std::to_string(lineno) + ": unknown header key '" + key + "'");
            out.kv[key] = value;
            continue;
        }
        std::string normalized = line;
        for (char& c : normalized)
            if (c == ',' || c == '\t') c = ' ';
        const auto cols = split_ws(normalized);
        if (cols.size() != 2)
            fail(Errc::invalid_input,
                 path + ":" + std::to_string(lineno) + ": expected two columns");
        double a = 0.0, b = 0.0;
        if (!parse_number(cols[0], a) || !parse_number(cols[1], b))
            fail(Errc::invalid_input,
                 path + ":" + std::to_string(lineno) + ": non-numeric column");
        out.rows.emplace_back(a, b);
    }
    return out;
}

} // namespace

const char* trace_kind_name(TraceKind k)
{
    switch (k) {
        case TraceKind::reflection_mw: return "reflection_mw";
        case TraceKind::reflection_opt: return "reflection_opt";
        case TraceKind::conversion: return "conversion";
        case TraceKind::noise_psd: return "noise_psd";
    }
    return "unknown";
}

TraceKind trace_kind_from_name(const std::string& name)
{
    if (name == "reflection_mw") return TraceKind::reflection_mw;
    if (name == "reflection_opt") return TraceKind::reflection_opt;
    if (name == "conversion") return TraceKind::conversion;
    if (name == "noise_psd") return TraceKind::noise_psd;
    fail(Errc::malformed_header, "unknown trace kind '" + name + "'");
}

std::optional<double> SpectrumTrace::meta_number(const std::string& key) const
{
    const auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    double v = 0.0;
    if (!parse_number(it->second, v)) return std::nullopt;
    return v;
}

void SpectrumTrace::validate() const
{
    if (freq_hz.size() != value.size())
        fail(Errc::invalid_input, "trace: column length mismatch");
    if (freq_hz.size() < 2) fail(Errc::invalid_input, "trace: need at least two points");
    for (std::size_t i = 0; i < freq_hz.size(); ++i) {
        if (!std::isfinite(freq_hz[i]) || !std::isfinite(value[i]))
            fail(Errc::invalid_input, "trace: non-finite sample");
        if (i > 0 && freq_hz[i] <= freq_hz[i - 1])
            fail(Errc::non_monotone_freq, "trace: frequency column must be strictly increasing");
    }
    if (kind == TraceKind::noise_psd && !rbw_hz())
        fail(Errc::unit_mismatch, "trace: noise_psd requires rbw_hz in the header");
}

SpectrumTrace load_trace(const std::string& path)
{
    HeaderBlock block = parse_columns_file(path);
    if (!block.kv.count("kind"))
        fail(Errc::malformed_header, path + ": missing 'kind' header");
    SpectrumTrace trace;
    trace.kind = trace_kind_from_name(block.kv.at("kind"));
    trace.meta = block.kv;
    trace.meta.erase("kind");

    const std::string unit_x = block.kv.count("unit_x") ? block.kv.at("unit_x") : "Hz";
    const double fx = unit_x_factor(unit_x, path);
    std::string unit_y = block.kv.count("unit_y") ? block.kv.at("unit_y") : std::string();
    if (unit_y.empty()) unit_y = trace.kind == TraceKind::noise_psd ? "W" : "dimensionless";
    if (trace.kind == TraceKind::noise_psd) {
        if (unit_y != "W")
            fail(Errc::unit_mismatch, path + ": noise_psd traces must have unit_y W");
    } else if (unit_y != "dimensionless" && unit_y != "1" && unit_y != "ratio") {
        fail(Errc::unit_mismatch,
             path + ": " + trace_kind_name(trace.kind) + " traces must be dimensionless");
    }
    // Frequencies normalize to Hz; the stored meta keeps the raw strings.
    trace.meta.erase("unit_x");
    trace.meta.erase("unit_y");

    trace.freq_hz.reserve(block.rows.size());
    trace.value.reserve(block.rows.size());
    for (const auto& [f, v] : block.rows) {
        trace.freq_hz.push_back(f * fx);
        trace.value.push_back(v);
    }
    trace.validate();
    return trace;
}

void save_trace(const SpectrumTrace& trace, const std::string& path)
{
    trace.validate();
    std::string out;
    out += "# kind: " + std::string(trace_kind_name(trace.kind)) + "\n";
    out += "# unit_x: Hz\n";
    out += "# unit_y: " + std::string(trace.kind == TraceKind::noise_psd ? "W" : "dimensionless") +
           "\n";
    for (const auto& [k, v] : trace.meta) out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < trace.freq_hz.size(); ++i)
        out += fmt_double(trace.freq_hz[i]) + " " + fmt_double(trace.value[i]) + "\n";
    atomic_write_file(path, out);
}

std::vector<RadiometerPoint> load_radiometer_points(const std::string& path)
{
    HeaderBlock block = parse_columns_file(path);
    if (!block.kv.count("kind") || block.kv.at("kind") != "radiometer")
        fail(Errc::malformed_header, path + ": expected 'kind: radiometer'");
    if (block.kv.count("unit_x") && block.kv.at("unit_x") != "K")
        fail(Errc::unit_mismatch, path + ": radiometer unit_x must be K");
    if (block.kv.count("unit_y") && block.kv.at("unit_y") != "W")
        fail(Errc::unit_mismatch, path + ": radiometer unit_y must be W");
    std::vector<RadiometerPoint> points;
    points.reserve(block.rows.size());
    for (const auto& [t, psd] : block.rows) points.emplace_back(t, psd);
    if (points.size() < 2) fail(Errc::invalid_input, path + ": need at least two points");
    return points;
}

} // namespace eoct

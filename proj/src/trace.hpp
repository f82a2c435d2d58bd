#ifndef EOCT_TRACE_HPP
#define EOCT_TRACE_HPP

#include "noise.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eoct {

enum class TraceKind { reflection_mw, reflection_opt, conversion, noise_psd };

const char* trace_kind_name(TraceKind k);
TraceKind trace_kind_from_name(const std::string& name);

// A frequency-indexed measurement vector. Files are plain text: a
// "# key: value" header followed by two whitespace-separated columns.
// Recognized header keys: kind, unit_x, unit_y, rbw_hz, pump_power_w,
// piezo_v, timestamp. Frequencies are stored in Hz, strictly increasing.
struct SpectrumTrace {
    std::vector<double> freq_hz;
    std::vector<double> value; // dimensionless ratio, or W for noise_psd
    TraceKind kind = TraceKind::reflection_mw;
    std::map<std::string, std::string> meta;

    std::optional<double> meta_number(const std::string& key) const;
    std::optional<double> pump_power_w() const { return meta_number("pump_power_w"); }
    std::optional<double> rbw_hz() const { return meta_number("rbw_hz"); }
    std::optional<double> piezo_v() const { return meta_number("piezo_v"); }

    void validate() const;
};

SpectrumTrace load_trace(const std::string& path);
void save_trace(const SpectrumTrace& trace, const std::string& path);

// Radiometer calibration files share the header idiom with kind "radiometer",
// unit_x K and unit_y W; columns are load temperature and measured PSD.
std::vector<RadiometerPoint> load_radiometer_points(const std::string& path);

} // namespace eoct

#endif

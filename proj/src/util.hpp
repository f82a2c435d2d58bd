#ifndef EOCT_UTIL_HPP
#define EOCT_UTIL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace eoct {

// FNV-1a over raw bytes; used for config/input provenance digests.
std::uint64_t fnv1a64(std::span<const char> bytes);
std::string fnv1a64_hex(std::span<const char> bytes);

// Shortest round-trip decimal representation of a double ("nan"/"inf" spelled
// out). Keeps report files deterministic and loss-free.
std::string fmt_double(double x);

std::string read_file(const std::string& path);

// Write-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

// Piecewise-linear interpolation, clamped to the table ends. xs must be
// strictly increasing.
double linear_interp(std::span<const double> xs, std::span<const double> ys, double x);

std::vector<std::string> split_ws(const std::string& line);

} // namespace eoct

#endif

#ifndef EOCT_PHYSICS_HPP
#define EOCT_PHYSICS_HPP

namespace eoct {

// CODATA 2018 values, SI units. h is stored as 2*pi*hbar so the pair stays
// consistent to the last bit.
namespace consts {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double hbar = 1.054571817e-34; // J s
inline constexpr double h = two_pi * hbar;      // J s
inline constexpr double k_b = 1.380649e-23;     // J / K
inline constexpr double c = 299792458.0;        // m / s
inline constexpr double eps0 = 8.8541878128e-12; // F / m
} // namespace consts

// Angular frequency in rad/s. All internal rates and frequencies are angular;
// user-facing I/O is ordinary frequency in Hz (the "kappa/(2pi)" reporting
// convention), so the 2*pi conversions live here and nowhere else.
class AngularFrequency {
public:
    AngularFrequency() = default;
    static AngularFrequency from_hz(double f_hz);
    static AngularFrequency from_rad_s(double w);

    double rad_s() const { return rad_s_; }
    double hz() const { return rad_s_ / consts::two_pi; }

private:
    explicit AngularFrequency(double w) : rad_s_(w) {}
    double rad_s_ = 0.0;
};

// Power dB (10*log10). Amplitude dB is never used in this library.
class PowerDb {
public:
    PowerDb() = default;
    static PowerDb from_db(double db);
    static PowerDb from_linear(double ratio);

    double db() const { return db_; }
    double linear() const;

private:
    explicit PowerDb(double db) : db_(db) {}
    double db_ = 0.0;
};

double db_from_linear(double ratio);
double linear_from_db(double db);

// Bose-Einstein occupancy 1/(exp(h f / k_B T) - 1); returns 0 at T = 0.
double planck_occupation(double freq_hz, double temperature_k);

} // namespace eoct

#endif

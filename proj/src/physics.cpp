#include "physics.hpp"

#include "error.hpp"

#include <cmath>
#include <string>

namespace eoct {

AngularFrequency AngularFrequency::from_hz(double f_hz)
{
    if (!std::isfinite(f_hz) || f_hz < 0.0)
        fail(Errc::invalid_input, "frequency must be finite and >= 0, got " + std::to_string(f_hz));
    return AngularFrequency(consts::two_pi * f_hz);
}

AngularFrequency AngularFrequency::from_rad_s(double w)
{
    if (!std::isfinite(w) || w < 0.0)
        fail(Errc::invalid_input, "angular frequency must be finite and >= 0, got " + std::to_string(w));
    return AngularFrequency(w);
}

PowerDb PowerDb::from_db(double db)
{
    if (!std::isfinite(db)) fail(Errc::invalid_input, "dB value must be finite");
    return PowerDb(db);
}

PowerDb PowerDb::from_linear(double ratio)
{
    return PowerDb(db_from_linear(ratio));
}

double PowerDb::linear() const
{
    return linear_from_db(db_);
}

double db_from_linear(double ratio)
{
    if (!std::isfinite(ratio) || ratio <= 0.0)
        fail(Errc::invalid_input, "power ratio must be finite and > 0, got " + std::to_string(ratio));
    return 10.0 * std::log10(ratio);
}

double linear_from_db(double db)
{
    if (!std::isfinite(db)) fail(Errc::invalid_input, "dB value must be finite");
    return std::pow(10.0, db / 10.0);
}

double planck_occupation(double freq_hz, double temperature_k)
{
    if (!std::isfinite(freq_hz) || !std::isfinite(temperature_k))
        fail(Errc::invalid_input, "planck_occupation: non-finite input");
    if (freq_hz <= 0.0)
        fail(Errc::invalid_input, "planck_occupation: frequency must be > 0");
    if (temperature_k < 0.0)
        fail(Errc::invalid_input, "planck_occupation: temperature must be >= 0");
    if (temperature_k == 0.0) return 0.0;
    const double x = consts::h * freq_hz / (consts::k_b * temperature_k);
    // expm1 keeps the high-temperature (small x) limit accurate.
    return 1.0 / std::expm1(x);
}

} // namespace eoct

#ifndef EOCT_TEST_HELPERS_HPP
#define EOCT_TEST_HELPERS_HPP

#include "device.hpp"
#include "physics.hpp"

namespace eoct::testing {

// The reference transducer used throughout the tests: critically coupled
// optics, microwave linewidth selectable via its total kappa_e in ordinary
// MHz (external coupling fixed at 3.7 MHz).
inline DeviceParams reference_device(double kappa_e_mhz = 14.85, double g0_hz = 40.0,
                                     double lambda_sq = 0.38)
{
    const double kappa_ex_e = consts::two_pi * 3.7e6;
    const double kappa_in_e = consts::two_pi * kappa_e_mhz * 1e6 - kappa_ex_e;
    const double fsr_hz = 8.818e9;
    const double f_p = 193.5e12;
    ResonatorMode mw(AngularFrequency::from_hz(8.8e9), kappa_in_e, kappa_ex_e, 1);
    ResonatorMode pump(AngularFrequency::from_hz(f_p), consts::two_pi * 9.46e6,
                       consts::two_pi * 9.46e6, 20000);
    ResonatorMode signal(AngularFrequency::from_hz(f_p + fsr_hz), consts::two_pi * 9.46e6,
                         consts::two_pi * 9.46e6, 20001);
    return DeviceParams(mw, pump, signal, consts::two_pi * g0_hz, lambda_sq,
                        AngularFrequency::from_hz(fsr_hz));
}

} // namespace eoct::testing

#endif

#pragma once

#include <stdexcept>

namespace leakspice {

// CODATA values, fixed (not configurable).
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K
inline constexpr double q_electron = 1.602177e-19;   // C

// kT/q in volts.
inline double thermal_voltage(double temp_k) {
    if (!(temp_k > 0.0))
        throw std::domain_error("thermal_voltage: temperature must be > 0 K");
    return k_boltzmann * temp_k / q_electron;
}

}  // namespace leakspice

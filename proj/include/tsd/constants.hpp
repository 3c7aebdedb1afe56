#pragma once

#include "tsd/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string_view>

namespace tsd {

struct NamedConstant {
    double value;
    std::string_view unit;
    std::string_view provenance;
};

struct PhysicalConstants {
    NamedConstant wavevector_k;
    NamedConstant boltzmann;
    NamedConstant atomic_mass_unit;
    NamedConstant rb87_mass;
    NamedConstant elementary_charge;
    NamedConstant electron_mass;
    NamedConstant hbar;
};

// CODATA 2018 recommended values. Rb-87 mass from D. A. Steck, "Rubidium 87 D Line Data" (2021).
inline constexpr PhysicalConstants physical_constants() {
    constexpr double amu = 1.66053906660e-27;
    return PhysicalConstants{
        {two_photon_wavevector, "rad/m", "2*pi*(1/420.3 nm - 1/1012.7 nm), two-photon ladder"},
        {1.380649e-23, "J/K", "CODATA 2018 (exact)"},
        {amu, "kg", "CODATA 2018"},
        {86.909180520 * amu, "kg", "Steck Rb-87 data, 86.909180520 u"},
        {1.602176634e-19, "C", "CODATA 2018 (exact)"},
        {9.1093837015e-31, "kg", "CODATA 2018"},
        {1.054571817e-34, "J s", "CODATA 2018"},
    };
}

// One-dimensional Maxwell-Boltzmann velocity width sqrt(kB T / m), m/s.
inline double thermal_velocity_width(double temperature_kelvin, double mass_kg = physical_constants().rb87_mass.value) {
    if (!(temperature_kelvin >= 0.0)) throw std::invalid_argument("temperature must be non-negative");
    if (!(mass_kg > 0.0)) throw std::invalid_argument("mass must be positive");
    return std::sqrt(physical_constants().boltzmann.value * temperature_kelvin / mass_kg);
}

}  // namespace tsd

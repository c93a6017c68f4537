#pragma once

namespace nes {

/// Physical constants used at the boundary between the scaled (dimensionless)
/// library quantities and reported SI/GeV values.
struct PhysicalConstants {
    double planck_energy_gev = 1.2e19;       ///< E_p
    double hbar_js = 1.054571817e-34;        ///< reduced Planck constant
    double joule_per_gev = 1.602176634e-10;  ///< energy conversion factor

    static constexpr PhysicalConstants defaults() { return {}; }
};

}  // namespace nes

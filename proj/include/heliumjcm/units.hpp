// units.hpp: physical constants, helium material data and field configuration.
//
// Public interfaces take lab units at the boundary (V/cm, T, K, GHz) through the
// helpers below and store SI internally. The eigenproblems run in a scaled
// system: energies in units of the effective Rydberg R_e, lengths in units of the
// effective Bohr radius r_B (see ScaledUnits).

#pragma once

#include <string>
#include <string_view>

namespace heliumjcm {

namespace constants {
// CODATA 2018 (exact where the SI defines them).
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double planck = 6.62607015e-34;               // J s
inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double electron_mass = 9.1093837015e-31;      // kg
inline constexpr double boltzmann = 1.380649e-23;              // J/K
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double pi = 3.14159265358979323846;
} // namespace constants

// Boundary conversions.
inline constexpr double volts_per_cm(double v) { return v * 100.0; }
inline constexpr double to_volts_per_cm(double v_per_m) { return v_per_m / 100.0; }
inline constexpr double to_ghz(double energy_joule) { return energy_joule / constants::planck * 1e-9; }
inline constexpr double from_ghz(double ghz) { return ghz * 1e9 * constants::planck; }
inline constexpr double millielectronvolts(double mev) { return mev * 1e-3 * constants::elementary_charge; }
inline constexpr double electronvolts(double ev) { return ev * constants::elementary_charge; }

enum class Isotope { He3, He4 };

std::string_view to_string(Isotope iso);
Isotope parse_isotope(std::string_view text);

struct MaterialProperties {
    Isotope isotope = Isotope::He3;
    double epsilon = 1.0;          // dielectric constant of the liquid
    double lambda_coupling = 0.0;  // image-charge strength Λ, J m
    double rydberg_energy = 0.0;   // R_e = m Λ² / 2ħ², J
    double bohr_radius = 0.0;      // r_B = ħ² / (Λ m), m
    double barrier_height = 0.0;   // V₀, J
    double surface_tension = 0.0;  // α, N/m
    double mass_density = 0.0;     // ρ, kg/m³

    // Throws ConfigError when a field is non-positive, ε ≤ 1, or R_e / r_B are
    // not the values derived from Λ.
    void validate() const;
};

// Effective Rydberg energy quoted for each isotope (0.36 meV for ³He, 0.63 meV
// for ⁴He); every spectrum in the library is calibrated against it.
double quoted_rydberg_energy(Isotope iso);
double default_surface_tension(Isotope iso);
double default_mass_density(Isotope iso);
inline constexpr double default_barrier_height = 1.0 * constants::elementary_charge;

// Bulk dielectric constants from the literature, used only for the Λ(ε)
// consistency report.
double literature_epsilon(Isotope iso);

// Λ = (e²/16πε₀)(ε−1)/(ε+1)
double lambda_from_epsilon(double epsilon);
double epsilon_from_lambda(double lambda);

// Builds the material with Λ calibrated to the quoted R_e of the isotope.
MaterialProperties material_for(Isotope iso,
                                double barrier_height = default_barrier_height,
                                double surface_tension = -1.0,
                                double mass_density = -1.0);

// Same, with an explicit effective Rydberg energy (J) instead of the quoted one.
MaterialProperties material_with_rydberg(Isotope iso, double rydberg_energy,
                                         double barrier_height = default_barrier_height,
                                         double surface_tension = -1.0,
                                         double mass_density = -1.0);

struct LambdaConsistency {
    double lambda_from_rydberg = 0.0;
    double lambda_from_literature_epsilon = 0.0;
    double relative_deviation = 0.0;
    bool within_one_percent = false;
};

LambdaConsistency lambda_consistency(const MaterialProperties& mat);

struct FieldConfiguration {
    double e_perp = 0.0;       // V/m
    double b_z = 0.0;          // T
    double b_y = 0.0;          // T
    double temperature = 0.3;  // K

    // Lab-unit constructor: E⊥ in V/cm.
    static FieldConfiguration lab(double e_perp_v_per_cm, double b_z, double b_y,
                                  double temperature = 0.3);

    void validate() const;
};

double cyclotron_frequency(double b);   // eB/m, rad/s
double magnetic_length(double b_z);     // √(ħ/eB_z), throws DegenerateField at 0

struct DerivedFrequencies {
    double omega_c = 0.0;
    double omega_y = 0.0;
    double magnetic_length = 0.0;
};

DerivedFrequencies derived_frequencies(const FieldConfiguration& cfg);

// Energy and length scales of the internal unit system.
struct ScaledUnits {
    double energy = 1.0;  // J per internal energy unit (R_e)
    double length = 1.0;  // m per internal length unit (r_B)

    static ScaledUnits of(const MaterialProperties& mat) {
        return {mat.rydberg_energy, mat.bohr_radius};
    }
};

} // namespace heliumjcm

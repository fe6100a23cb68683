#include "heliumjcm/units.hpp"

#include "heliumjcm/errors.hpp"

#include <cmath>
#include <string>

namespace heliumjcm {

using namespace constants;

std::string_view to_string(Isotope iso) {
    return iso == Isotope::He3 ? "He3" : "He4";
}

Isotope parse_isotope(std::string_view text) {
    if (text == "He3" || text == "he3" || text == "3He" || text == "3")
        return Isotope::He3;
    if (text == "He4" || text == "he4" || text == "4He" || text == "4")
        return Isotope::He4;
    throw ConfigError("unknown isotope '" + std::string(text) + "' (expected He3 or He4)");
}

double quoted_rydberg_energy(Isotope iso) {
    return millielectronvolts(iso == Isotope::He3 ? 0.36 : 0.63);
}

double default_surface_tension(Isotope iso) {
    return iso == Isotope::He3 ? 1.55e-4 : 3.78e-4;
}

double default_mass_density(Isotope iso) {
    return iso == Isotope::He3 ? 82.0 : 145.0;
}

double literature_epsilon(Isotope iso) {
    return iso == Isotope::He3 ? 1.0426 : 1.0572;
}

namespace {
constexpr double image_prefactor() {
    return elementary_charge * elementary_charge / (16.0 * pi * vacuum_permittivity);
}
} // namespace

double lambda_from_epsilon(double epsilon) {
    return image_prefactor() * (epsilon - 1.0) / (epsilon + 1.0);
}

double epsilon_from_lambda(double lambda) {
    const double x = lambda / image_prefactor();
    return (1.0 + x) / (1.0 - x);
}

MaterialProperties material_with_rydberg(Isotope iso, double rydberg_energy, double barrier_height,
                                         double surface_tension, double mass_density) {
    if (!(rydberg_energy > 0.0))
        throw ConfigError("rydberg energy must be positive");
    MaterialProperties mat;
    mat.isotope = iso;
    // R_e = mΛ²/2ħ²  =>  Λ = ħ √(2R_e/m)
    mat.lambda_coupling = hbar * std::sqrt(2.0 * rydberg_energy / electron_mass);
    mat.rydberg_energy = electron_mass * mat.lambda_coupling * mat.lambda_coupling / (2.0 * hbar * hbar);
    mat.bohr_radius = hbar * hbar / (mat.lambda_coupling * electron_mass);
    mat.epsilon = epsilon_from_lambda(mat.lambda_coupling);
    mat.barrier_height = barrier_height;
    mat.surface_tension = surface_tension > 0.0 ? surface_tension : default_surface_tension(iso);
    mat.mass_density = mass_density > 0.0 ? mass_density : default_mass_density(iso);
    mat.validate();
    return mat;
}

MaterialProperties material_for(Isotope iso, double barrier_height, double surface_tension,
                                double mass_density) {
    return material_with_rydberg(iso, quoted_rydberg_energy(iso), barrier_height, surface_tension,
                                 mass_density);
}

void MaterialProperties::validate() const {
    if (!(lambda_coupling > 0.0 && rydberg_energy > 0.0 && bohr_radius > 0.0))
        throw ConfigError("material: Λ, R_e and r_B must be positive");
    if (!(barrier_height > 0.0))
        throw ConfigError("material: barrier height V0 must be positive");
    if (!(surface_tension > 0.0))
        throw ConfigError("material: surface tension must be positive");
    if (!(mass_density > 0.0))
        throw ConfigError("material: mass density must be positive");
    if (!(epsilon > 1.0))
        throw ConfigError("material: dielectric constant must exceed 1");
    const double re = electron_mass * lambda_coupling * lambda_coupling / (2.0 * hbar * hbar);
    const double rb = hbar * hbar / (lambda_coupling * electron_mass);
    if (std::abs(re - rydberg_energy) > 1e-12 * re || std::abs(rb - bohr_radius) > 1e-12 * rb)
        throw ConfigError("material: R_e and r_B are inconsistent with Λ");
}

LambdaConsistency lambda_consistency(const MaterialProperties& mat) {
    LambdaConsistency out;
    out.lambda_from_rydberg = mat.lambda_coupling;
    out.lambda_from_literature_epsilon = lambda_from_epsilon(literature_epsilon(mat.isotope));
    out.relative_deviation =
        std::abs(out.lambda_from_rydberg - out.lambda_from_literature_epsilon) / out.lambda_from_rydberg;
    out.within_one_percent = out.relative_deviation <= 0.01;
    return out;
}

FieldConfiguration FieldConfiguration::lab(double e_perp_v_per_cm, double b_z, double b_y,
                                           double temperature) {
    FieldConfiguration cfg{volts_per_cm(e_perp_v_per_cm), b_z, b_y, temperature};
    cfg.validate();
    return cfg;
}

void FieldConfiguration::validate() const {
    if (!(e_perp >= 0.0))
        throw ConfigError("field: e_perp must be >= 0");
    if (!(b_z >= 0.0))
        throw ConfigError("field: b_z must be >= 0");
    if (!std::isfinite(b_y))
        throw ConfigError("field: b_y must be finite");
    if (!(temperature > 0.0))
        throw ConfigError("field: temperature must be > 0");
}

double cyclotron_frequency(double b) {
    return elementary_charge * b / electron_mass;
}

double magnetic_length(double b_z) {
    if (!(b_z > 0.0))
        throw DegenerateField("magnetic length requires b_z > 0");
    return std::sqrt(hbar / (elementary_charge * b_z));
}

DerivedFrequencies derived_frequencies(const FieldConfiguration& cfg) {
    return {cyclotron_frequency(cfg.b_z), cyclotron_frequency(cfg.b_y), magnetic_length(cfg.b_z)};
}

} // namespace heliumjcm

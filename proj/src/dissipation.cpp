#include "heliumjcm/dissipation.hpp"

#include "heliumjcm/errors.hpp"
#include "heliumjcm/jcm.hpp"

#include <algorithm>
#include <cmath>

namespace heliumjcm {

RipplonBath RipplonBath::of(const MaterialProperties& mat, double temperature) {
    return {mat.surface_tension, mat.mass_density, temperature};
}

double RipplonBath::frequency(double q) const { return std::sqrt(surface_tension * q * q * q / mass_density); }

double RipplonBath::group_velocity(double q) const { return 1.5 * frequency(q) / q; }

double RipplonBath::occupation(double q) const {
    if (!(temperature > 0.0))
        return 0.0;
    const double x = constants::hbar * frequency(q) / (constants::boltzmann * temperature);
    return 1.0 / std::expm1(x);
}

double resonant_wavenumber(const RipplonBath& bath, double energy_gap) {
    if (!(energy_gap > 0.0))
        throw NotDownward("resonant wavenumber needs a positive energy gap");
    return std::cbrt(bath.mass_density / bath.surface_tension) *
           std::pow(energy_gap / (2.0 * constants::hbar), 2.0 / 3.0);
}

double two_ripplon_rate(const VerticalSpectrum& vs, const RipplonBath& bath, const FieldConfiguration& cfg,
                        BasisState from, BasisState to, RateOptions options) {
    if (from.n < 1 || from.n > vs.n_max() || to.n < 1 || to.n > vs.n_max())
        throw BasisMismatch("rate states outside the vertical spectrum");
    const double lb = magnetic_length(cfg.b_z);
    const double hw = constants::hbar * cyclotron_frequency(cfg.b_z);
    const double released = (vs.energy(from.n) + hw * from.l) - (vs.energy(to.n) + hw * to.l);
    if (!(released > 0.0))
        throw NotDownward("two-ripplon rate: |from> is not above |to>");

    const double q = resonant_wavenumber(bath, released);
    const double w = bath.frequency(q);
    const double hbar = constants::hbar;
    const double rho = bath.mass_density;
    const double prefactor = constants::electron_mass * vs.material.barrier_height /
                             (4.0 * constants::pi * lb * lb * rho * rho * hbar * hbar);
    double rate = prefactor * vs.dvdz(from.n) * vs.dvdz(to.n) * q * q * q / (w * w * bath.group_velocity(q));
    if (options.finite_temperature) {
        const double n = bath.occupation(q);
        rate *= (1.0 + n) * (1.0 + n);
    }
    return rate;
}

double scba_elastic_rate(double nu_0, const FieldConfiguration& cfg) {
    if (nu_0 < 0.0)
        throw ConfigError("nu_0 must be >= 0");
    return std::sqrt(2.0 * cyclotron_frequency(cfg.b_z) * nu_0 / constants::pi);
}

double field_for_elastic_rate(double nu_b, double nu_0) {
    if (!(nu_0 > 0.0))
        throw ConfigError("nu_0 must be positive");
    const double omega_c = constants::pi * nu_b * nu_b / (2.0 * nu_0);
    return omega_c * constants::electron_mass / constants::elementary_charge;
}

StrongCouplingReport strong_coupling_report(const VerticalSpectrum& vs, const RipplonBath& bath,
                                            const FieldConfiguration& cfg, double nu_0, int n, int n_prime,
                                            RateOptions options) {
    StrongCouplingReport r;
    r.excited = {n_prime, 0};
    r.ground = {n, 1};
    const double g = coupling_constant(vs, cfg, n, n_prime);
    r.g_ghz = to_ghz(g);
    r.q_tilde = resonant_wavenumber(bath, vs.transition(n, n_prime));
    r.gamma_vertical = two_ripplon_rate(vs, bath, cfg, {n_prime, 0}, {n, 0}, options);
    r.gamma_cyclotron = two_ripplon_rate(vs, bath, cfg, {n, 1}, {n, 0}, options);
    r.nu_b = scba_elastic_rate(nu_0, cfg);
    const double worst = std::max(r.gamma_vertical, r.gamma_cyclotron);
    r.ratio = std::abs(g) / (constants::hbar * worst);
    r.dephasing_ratio = r.nu_b > 0.0 ? std::abs(g) / (constants::hbar * r.nu_b) : 0.0;
    r.gamma_vertical_per_ev = r.gamma_vertical / (vs.material.barrier_height / constants::elementary_charge);
    return r;
}

} // namespace heliumjcm

// dissipation.hpp: ripplon-limited decay and dephasing estimates.

#pragma once

#include "heliumjcm/coupled.hpp"
#include "heliumjcm/units.hpp"
#include "heliumjcm/vertical.hpp"

namespace heliumjcm {

// Capillary waves on the free surface, ω_q = √(α q³ / ρ).
struct RipplonBath {
    double surface_tension = 0.0;  // α, N/m
    double mass_density = 0.0;     // ρ, kg/m³
    double temperature = 0.0;      // K

    static RipplonBath of(const MaterialProperties& mat, double temperature);

    double frequency(double q) const;       // rad/s
    double group_velocity(double q) const;  // ∂ω/∂q = (3/2) ω_q / q, m/s
    double occupation(double q) const;      // Bose factor N_q
};

// Root of 2ħω_q = ΔE: q̃ = (ρ/α)^{1/3} (ΔE / 2ħ)^{2/3}, 1/m.
double resonant_wavenumber(const RipplonBath& bath, double energy_gap);

struct RateOptions {
    // Multiply by (1 + N_q̃)² for stimulated emission into a thermal bath.
    bool finite_temperature = false;
};

// Two-ripplon emission rate |from> → |to>, 1/s:
//   Γ = [m V₀ / (4π l_B² ρ² ħ²)] (∂υ/∂z)_nn (∂υ/∂z)_n'n' q̃³ / (ω_q̃² ∂ω/∂q)
// with q̃ set by the released energy E_from − E_to (Landau energies included).
// Throws NotDownward when that energy is not positive and DegenerateField at B_z ≤ 0.
double two_ripplon_rate(const VerticalSpectrum& vs, const RipplonBath& bath, const FieldConfiguration& cfg,
                        BasisState from, BasisState to, RateOptions options = {});

// ν_B = √(2 ω_c ν₀ / π), 1/s.
double scba_elastic_rate(double nu_0, const FieldConfiguration& cfg);

// B_z at which scba_elastic_rate returns nu_b.
double field_for_elastic_rate(double nu_b, double nu_0);

struct StrongCouplingReport {
    BasisState excited;       // |n', l>
    BasisState ground;        // |n, l+1> partner, e.g. |1,1> for the (1,1)/(2,0) pair
    double g_ghz = 0.0;       // g_nn'/h
    double q_tilde = 0.0;     // for the vertical transition, 1/m
    double gamma_vertical = 0.0;  // Γ for |n',0> → |n,0>, 1/s
    double gamma_cyclotron = 0.0; // Γ for |n,1> → |n,0>, 1/s
    double nu_b = 0.0;            // 1/s
    double ratio = 0.0;           // |g| / (ħ max Γ)
    double dephasing_ratio = 0.0; // |g| / (ħ ν_B)
    double gamma_vertical_per_ev = 0.0;  // ∂Γ_vertical/∂V₀, 1/(s eV); Γ is linear in V₀
};

// Figure of merit for the (n,1)/(n',0) resonance (default n = 1, n' = 2).
StrongCouplingReport strong_coupling_report(const VerticalSpectrum& vs, const RipplonBath& bath,
                                            const FieldConfiguration& cfg, double nu_0, int n = 1,
                                            int n_prime = 2, RateOptions options = {});

} // namespace heliumjcm

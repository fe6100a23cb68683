// jcm.hpp: closed-form Jaynes-Cummings layer on top of the vertical spectrum.
//
// Energies follow the coupled-spectrum convention (ħω_c/2 subtracted). All
// functions are pure.

#pragma once

#include "heliumjcm/coupled.hpp"
#include "heliumjcm/units.hpp"
#include "heliumjcm/vertical.hpp"

#include <vector>

namespace heliumjcm {

// g_nn' = (ħω_y/√2 l_B) z_nn' = √(ħ m ω_c ω_y²/2) z_nn', J. Throws DegenerateField at B_z ≤ 0.
double coupling_constant(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n, int n_prime);

// Ẽ_{n,l} = E_n + ħω_c l + m ω_y² (z²)_nn / 2, J.
double renormalized_energy(const VerticalSpectrum& vs, const FieldConfiguration& cfg, BasisState s);

// Two-level dressing of |n,l+1> and |n',l>:
//   |+,l> = cos(θ/2)|n',l> + sin(θ/2)|n,l+1>,  |−,l> = −sin(θ/2)|n',l> + cos(θ/2)|n,l+1>
struct DressedPair {
    BasisState upper_bare;  // |n, l+1>
    BasisState lower_bare;  // |n', l>
    double g = 0.0;         // g_nn', J
    double e_sigma = 0.0;   // (Ẽ_{n,l+1} + Ẽ_{n',l})/2, J
    double e_delta = 0.0;   // (Ẽ_{n,l+1} − Ẽ_{n',l})/2, J
    double e_plus = 0.0;
    double e_minus = 0.0;
    // atan2(g√(l+1), −E_Δ): the angle for which the states above are the
    // eigenvectors. Equals π/2 (sign of g) on resonance.
    double mixing_angle = 0.0;

    // tan⁻¹(g√(l+1)/(2E_Δ)) as commonly quoted; agrees with mixing_angle only at E_Δ = 0.
    double quoted_mixing_angle() const;
    double splitting() const { return e_plus - e_minus; }
};

DressedPair dressed_pair(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n, int n_prime, int l);

// Guard for the perturbative formulas: every denominator |E_nn' ± ħω_c| that
// enters must exceed factor·|g_nn'|, otherwise NearResonance is thrown.
struct ResonanceGuard {
    double factor = 3.0;
};

// Shift of |n,l> after the diamagnetic/paramagnetic cancellation, J.
double perturbative_shift(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n, int l,
                          ResonanceGuard guard = {});

// Δ_l = (ΔE_{2,l} − ΔE_{1,l})/h, GHz.
double transition_shift(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int l,
                        ResonanceGuard guard = {});

// Δ₀ from its explicit l = 0 form (sums weighted by E_n'n/(E_n'n + ħω_c)), GHz.
double lamb_shift(const VerticalSpectrum& vs, const FieldConfiguration& cfg, ResonanceGuard guard = {});

// Same quantity from the full diagonalization: E(2,l) − E(1,l) − (E₂ − E₁) with
// eigenstates picked by their largest product-state weight, GHz.
double diagonalized_transition_shift(const VerticalSpectrum& vs, const FieldConfiguration& cfg,
                                     const ProductBasis& basis, int l);

struct BetheCheck {
    double raw = 0.0;          // diamagnetic first order + full paramagnetic second order, J
    double reduced = 0.0;      // perturbative_shift, J
    double diamagnetic = 0.0;  // m ω_y² (z²)_nn / 2, J
    // |raw − reduced| / diamagnetic; the difference is the closure defect of the
    // truncated z_nn' table.
    double residual = 0.0;
};

BetheCheck bethe_cancellation_check(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n, int l,
                                    ResonanceGuard guard = {});

struct AdmixedAmplitude {
    BasisState state;
    double amplitude = 0.0;
};

// First-order admixtures of |n,l> on |n',l±1> for every n' of vs (including n' = n).
std::vector<AdmixedAmplitude> admixed_state(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n,
                                            int l, ResonanceGuard guard = {});

// |n,l> plus its admixtures as a normalized vector in `basis` (components outside
// the basis dropped).
Eigen::VectorXd admixed_vector(const VerticalSpectrum& vs, const FieldConfiguration& cfg,
                               const ProductBasis& basis, int n, int l, ResonanceGuard guard = {});

// Leading-order moments of the |1,0> → (2,1)/(3,0) doublet, in metres:
//   z_upper = a + s z₃₁, z_lower = a − s z₃₁,  a = z₂₂ z₂₁ B_y / (√2 l_B B_z),  s = sgn g₂₃.
struct InterferenceMoments {
    double z_upper = 0.0;
    double z_lower = 0.0;
};

InterferenceMoments interference_moments(const VerticalSpectrum& vs, const FieldConfiguration& cfg);

// B_y where the leading-order moment of one branch vanishes: √2 l_B B_z |z₃₁/z₂₁| / z₂₂.
double cancellation_field(double z22, double z31_over_z21, double b_z);

struct InterferencePoint {
    double b_y = 0.0;
    InterferenceMoments analytic;  // m
    double upper_moment_sq = 0.0;  // |<upper|z|ground>|², m², full diagonalization
    double lower_moment_sq = 0.0;
    double upper_energy_ghz = 0.0;
    double lower_energy_ghz = 0.0;
};

// Doublet moments along a B_y sweep at fixed B_z and E⊥. The pair is identified
// at the first B_y > 0 by its weight on |2,1> and |3,0> and then followed by
// eigenvector overlap.
std::vector<InterferencePoint> interference_scan(const VerticalSpectrum& vs, const FieldConfiguration& base,
                                                 const ProductBasis& basis, const std::vector<double>& b_y,
                                                 int threads = 1);

// Location of the smallest upper-branch |moment|² of a scan (parabolic refinement).
// Points at B_y = 0 are skipped.
double upper_branch_minimum(const std::vector<InterferencePoint>& scan);

} // namespace heliumjcm

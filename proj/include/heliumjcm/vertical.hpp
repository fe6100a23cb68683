// vertical.hpp: surface-bound (Rydberg) states of the vertical motion.
//
// Solves −(ħ²/2m)ψ'' − Λ/z ψ + eE⊥z ψ = Eψ on (0, z_max] with a rigid wall at
// z = 0 and a Dirichlet node at z_max. In scaled units (R_e, r_B) the operator
// is −d²/dx² − 2/x + f x with f = eE⊥r_B/R_e.

#pragma once

#include "heliumjcm/units.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace heliumjcm {

struct GridSpec {
    double z_max = 150.0;  // in r_B
    int n_points = 4000;   // intervals; interior nodes = n_points - 1
    // Richardson-extrapolate the energies from this grid and the half grid.
    bool extrapolate_energies = true;

    double spacing() const { return z_max / n_points; }
    void validate() const;
};

struct VerticalSpectrum {
    MaterialProperties material;
    double e_perp = 0.0;  // V/m
    GridSpec grid;
    ScaledUnits units;

    Eigen::VectorXd z;             // interior grid nodes, r_B
    Eigen::VectorXd energies;      // E_n, R_e (index 0 is n = 1)
    Eigen::MatrixXd wavefunctions; // ψ_n(z_i), r_B^{-1/2}, column per state
    Eigen::MatrixXd z_matrix;      // z_nn', r_B
    Eigen::MatrixXd z2_matrix;     // (z²)_nn', r_B²
    Eigen::VectorXd dvdz_diag;     // (∂υ/∂z)_nn = <Λ/z² + eE⊥>, R_e/r_B
    Eigen::VectorXd dvdz_wall;     // same from the wall slope ψ'_n(0)², R_e/r_B

    int n_max() const { return static_cast<int>(energies.size()); }

    // SI accessors, quantum numbers are 1-based.
    double energy(int n) const;                // J
    double transition(int n, int n_prime) const; // E_n' − E_n, J
    double z_elem(int n, int n_prime) const;   // m
    double z2_elem(int n, int n_prime) const;  // m²
    double dvdz(int n) const;                  // J/m
    double dvdz_from_wall(int n) const;        // J/m
};

// Lowest n_max eigenpairs plus matrix-element tables. Throws GridTooSmall when
// the ψ_{n_max} tail in the outer 5% of the box exceeds 1e-6 of its norm, and
// ConvergenceFailure from the eigensolver.
VerticalSpectrum solve_vertical(const MaterialProperties& mat, double e_perp, int n_max,
                                const GridSpec& grid = {});

// d[(E_n' − E_n)/h]/dE⊥ in GHz per V/cm by central difference with δ = 0.1 V/cm
// (second-order one-sided when E⊥ < δ).
double stark_slope(const MaterialProperties& mat, double e_perp, int n, int n_prime,
                   const GridSpec& grid = {});

// residual_n = |(z²)_nn − Σ_n' |z_nn'|²| / (z²)_nn for every n of the spectrum.
std::vector<double> truncation_report(const VerticalSpectrum& vs);

// CSV dump: z_rB, psi_1, ..., psi_nmax.
void write_wavefunctions_csv(const VerticalSpectrum& vs, std::ostream& out);

} // namespace heliumjcm

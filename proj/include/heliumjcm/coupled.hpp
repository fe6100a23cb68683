// coupled.hpp: tilted-field Hamiltonian on the truncated product basis |n,l>.
//
// H = H_z + m ω_y² z²/2 + ħω_c a†a + (ħω_y/√2 l_B)(a† + a) z, with the cyclotron
// zero-point energy ħω_c/2 already subtracted. Matrix entries are in units of R_e.

#pragma once

#include "heliumjcm/units.hpp"
#include "heliumjcm/vertical.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace heliumjcm {

struct BasisState {
    int n = 1;  // Rydberg quantum number, 1-based
    int l = 0;  // Landau level

    friend bool operator==(const BasisState&, const BasisState&) = default;
};

class ProductBasis {
public:
    ProductBasis() = default;
    ProductBasis(int n_max, int l_max);

    int n_max() const { return n_max_; }
    int l_max() const { return l_max_; }
    int size() const { return n_max_ * (l_max_ + 1); }
    bool contains(BasisState s) const { return s.n >= 1 && s.n <= n_max_ && s.l >= 0 && s.l <= l_max_; }
    int index(BasisState s) const;
    BasisState state(int index) const;

private:
    int n_max_ = 0;
    int l_max_ = 0;
};

enum class DiamagneticMode {
    FullBlock,    // (z²)_nn' for all n, n' (renormalizes the vertical problem)
    DiagonalOnly  // (z²)_nn only, lower fidelity
};

Eigen::MatrixXd assemble_hamiltonian(const VerticalSpectrum& vs, const FieldConfiguration& cfg,
                                     const ProductBasis& basis,
                                     DiamagneticMode mode = DiamagneticMode::FullBlock);

struct DominantComponent {
    BasisState state;
    double weight = 0.0;
};

struct CoupledSpectrum {
    ProductBasis basis;
    Eigen::VectorXd eigenvalues;   // ascending, R_e
    Eigen::MatrixXd eigenvectors;  // columns
    FieldConfiguration config;
    ScaledUnits units;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    double energy(int k) const { return eigenvalues[k] * units.energy; }
    double energy_ghz(int k) const { return to_ghz(energy(k)); }
    double weight(int k, BasisState s) const;
    DominantComponent dominant(int k) const;
    // Eigenstate with the largest weight on the product state s.
    int find(BasisState s) const;
    // <k|z|k'> in r_B; z acts on the vertical factor only.
    double z_moment(const Eigen::MatrixXd& z_matrix, int k, int k_prime) const;
};

CoupledSpectrum diagonalize(const Eigen::MatrixXd& hamiltonian, const ProductBasis& basis,
                            const FieldConfiguration& cfg, const ScaledUnits& units);

CoupledSpectrum solve_coupled(const VerticalSpectrum& vs, const FieldConfiguration& cfg,
                              const ProductBasis& basis,
                              DiamagneticMode mode = DiamagneticMode::FullBlock);

enum class FieldAxis { BZ, BY };

// One diagonalization per value, evaluated on `threads` workers; results are
// ordered like `values`.
std::vector<CoupledSpectrum> sweep_field(const VerticalSpectrum& vs, const FieldConfiguration& base,
                                         const ProductBasis& basis, FieldAxis axis,
                                         const std::vector<double>& values, int threads = 1,
                                         DiamagneticMode mode = DiamagneticMode::FullBlock);

// B_z where the uncoupled energies E_a + ħω_c l_a and E_b + ħω_c l_b cross, by
// bisection to `tolerance` tesla. Throws NoCrossingInRange.
double find_crossing(const VerticalSpectrum& vs, BasisState a, BasisState b, double b_z_min,
                     double b_z_max, double tolerance = 1e-4);

// Follows one eigenstate through a family of spectra by maximal overlap with the
// previous step. Throws BranchTrackingLost when the best overlap drops below
// `min_overlap`.
std::vector<int> track_branch(const std::vector<CoupledSpectrum>& family, int start,
                              double min_overlap = 0.5);

struct GapResult {
    double b_z = 0.0;     // location of the minimum, T
    double gap = 0.0;     // J
    double gap_ghz = 0.0;
    std::size_t index = 0;  // sweep index closest to the minimum
};

// Minimum separation of the dressed pair built from the product states a and b.
// At each point the pair is the two eigenstates with the most weight in
// span{a, b}. Parabolic refinement through the three samples around the
// discrete minimum.
GapResult minimum_gap(const std::vector<double>& b_z, const std::vector<CoupledSpectrum>& family,
                      BasisState a, BasisState b);

// Coarse scan of [b_z_min, b_z_max] followed by a fine scan around the coarse
// minimum.
GapResult minimum_gap_scan(const VerticalSpectrum& vs, const FieldConfiguration& base,
                           const ProductBasis& basis, BasisState a, BasisState b, double b_z_min,
                           double b_z_max, int steps = 81, int threads = 1);

// Largest eigenvalue change, J, below the (4,0) level (or the top vertical level
// when n_max < 4) when l_max is raised by `extra`.
double truncation_drift(const VerticalSpectrum& vs, const FieldConfiguration& cfg, const ProductBasis& basis,
                        int extra = 30);

} // namespace heliumjcm

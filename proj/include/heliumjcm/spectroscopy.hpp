// spectroscopy.hpp: transition catalogs, line shapes and simulated absorption
// maps over (B_y or B_z) × E⊥ at a fixed microwave frequency.

#pragma once

#include "heliumjcm/coupled.hpp"
#include "heliumjcm/units.hpp"
#include "heliumjcm/vertical.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace heliumjcm {

// Boltzmann weights ∝ exp(−ħω_c l / k_B T) over l = 0..l_cut−1, normalized.
std::vector<double> thermal_populations(const FieldConfiguration& cfg, int l_cut);

struct TransitionLine {
    BasisState initial;           // Landau label of the thermally occupied ground-manifold state
    double thermal_weight = 0.0;
    int initial_index = 0;        // eigenstate indices in the spectrum they came from
    int final_index = 0;
    BasisState final_dominant;
    double final_weight = 0.0;
    double frequency_ghz = 0.0;   // (E_final − E_initial)/h
    double moment_sq = 0.0;       // |<final|z|initial>|², m²
    int sideband_order = 0;       // dominant Δl

    // Filled by absorption_map: resonance position and local Stark slope.
    double e_perp = 0.0;          // V/cm
    double stark_slope = 0.0;     // GHz per V/cm
    double sweep_value = 0.0;
    int sweep_index = -1;
};

// All lines from the eigenstates dominated by |1,l> (l < populations.size()) to
// final eigenstates with frequency in [f_min, f_max] GHz. Lines with
// moment_sq/r_B² below min_moment_sq are dropped.
std::vector<TransitionLine> transition_catalog(const CoupledSpectrum& cs, const VerticalSpectrum& vs,
                                               const std::vector<double>& populations, double f_min,
                                               double f_max, double min_moment_sq = 0.0);

struct BroadeningModel {
    double base_width = 0.2;          // GHz, FWHM at B_y = 0
    double kappa = 0.74;              // GHz per V/cm, converts field spread to frequency
    double density = 5e6;             // n_s, cm⁻²
    double field_coefficient = 4.31e-6;  // C_f in <E_f> = C_f n_s^{3/4}, V/cm
    double thermal_bz_threshold = 0.2;   // T; rms thermal term applies below this B_z

    void validate() const;
};

// Components of the width, GHz, combined in quadrature.
struct WidthBreakdown {
    double base = 0.0;
    double many_electron = 0.0;  // κ (B_y/B_z) <E_f>
    double thermal = 0.0;        // κ (k_B T/m)^{1/2} B_y, low B_z only
    double total = 0.0;
    bool low_field_regime = false;
};

WidthBreakdown broadening_breakdown(const FieldConfiguration& cfg, const BroadeningModel& model);
double broadening_width(const FieldConfiguration& cfg, const BroadeningModel& model);

// Gaussian in E⊥ centred at line.e_perp with frequency FWHM `width_ghz` mapped
// through |line.stark_slope|, area thermal_weight·moment_sq. Returned values are
// averages over bins of width `step` centred on each axis point, so the sum of
// values·step reproduces the area for profiles inside the axis (a zero width
// puts the whole area in one bin).
std::vector<double> line_profile(const TransitionLine& line, double width_ghz, const std::vector<double>& e_axis);

struct MapSpec {
    MaterialProperties material;
    FieldConfiguration base;  // e_perp ignored
    FieldAxis axis = FieldAxis::BY;
    std::vector<double> sweep;   // T
    double e_min = 15.0;         // V/cm
    double e_max = 35.0;
    int e_points = 401;
    double mw_frequency = 90.0;  // GHz
    BroadeningModel broadening;
    int l_cut = 4;
    int n_max = 6;
    int l_max = 50;
    GridSpec grid;
    double anchor_spacing = 1.0;   // V/cm between full solves
    double min_moment_sq = 1e-8;   // r_B²
    int threads = 1;

    std::vector<double> e_axis() const;
    void validate() const;
};

struct PointFailure {
    int sweep_index = 0;
    double sweep_value = 0.0;
    std::string kind;
    std::string message;
};

struct AbsorptionMap {
    FieldAxis axis = FieldAxis::BY;
    std::vector<double> sweep;
    std::vector<double> e_perp;     // V/cm
    Eigen::MatrixXd intensity;      // rows: sweep, cols: E⊥; max = 1
    Eigen::MatrixXd raw;            // before normalization, m² per V/cm
    double normalization = 0.0;     // max of raw
    std::vector<TransitionLine> lines;
    std::vector<WidthBreakdown> widths;  // per sweep point
    std::vector<PointFailure> failures;
    FieldConfiguration config;
    double mw_frequency = 0.0;
};

AbsorptionMap absorption_map(const MapSpec& spec);

// Long-form CSV: sweep_value,e_perp,intensity.
void write_map_csv(const AbsorptionMap& map, std::ostream& out);
// CSV of the located lines.
void write_lines_csv(const AbsorptionMap& map, std::ostream& out);

// Centroid of row `sweep_index` restricted to [lo, hi] V/cm.
double map_centroid(const AbsorptionMap& map, int sweep_index, double lo, double hi);

} // namespace heliumjcm

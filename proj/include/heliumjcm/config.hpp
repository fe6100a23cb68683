// config.hpp: run configuration for the command-line driver.
//
// Format: `key = value` lines grouped under `[section]` headers, `#` starts a
// comment. Every key is addressed as section.key; unknown keys are errors.
//
//   [field]
//   e_perp = 15        # V/cm
//   b_z = 0.65         # T
//   [sweep]
//   axis = b_y
//   start = 0
//   stop = 0.3
//   points = 31

#pragma once

#include "heliumjcm/coupled.hpp"
#include "heliumjcm/spectroscopy.hpp"
#include "heliumjcm/units.hpp"
#include "heliumjcm/vertical.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace heliumjcm {

enum class Task { SpectrumSweep, AbsorptionMap, Shifts, Crossings, Rates, SelfTest };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

struct SweepRange {
    FieldAxis axis = FieldAxis::BY;
    double start = 0.0;
    double stop = 0.0;
    int points = 0;

    std::vector<double> values() const;
};

struct CrossingPair {
    BasisState a;
    BasisState b;
};

struct RunConfig {
    std::string source;
    std::optional<Task> task;

    Isotope isotope = Isotope::He3;
    double rydberg_mev = 0.0;        // 0: quoted value for the isotope
    double barrier_ev = 1.0;
    double surface_tension = -1.0;   // < 0: isotope default
    double mass_density = -1.0;

    FieldConfiguration field;        // e_perp stored in V/m
    bool e_perp_set = false;
    bool b_z_set = false;

    std::optional<SweepRange> sweep;

    int n_max = 6;
    int l_max = 50;
    GridSpec grid;

    // absorption maps
    double mw_frequency = 90.0;
    double e_min = 15.0;
    double e_max = 35.0;
    int e_points = 401;
    double anchor_spacing = 1.0;
    int l_cut = 4;
    double min_moment_sq = 1e-8;
    bool interference = false;
    BroadeningModel broadening;

    // crossings
    std::vector<CrossingPair> pairs{{{2, 1}, {3, 0}}, {{1, 1}, {2, 0}}};
    double b_z_min = 0.05;
    double b_z_max = 4.0;
    std::vector<double> gap_b_y{0.05, 0.1, 0.15, 0.2};
    int gap_steps = 61;
    int gap_l_count = 4;
    double family_b_y = 0.1;  // B_y for the √(l+1) gap family

    // rates
    double nu_0 = 1e6;
    bool finite_temperature = false;

    // spectrum sweeps
    int levels = 40;

    std::string output_dir;

    MaterialProperties material() const;
    ProductBasis basis() const { return {n_max, l_max}; }

    // Throws ConfigError naming the offending key.
    void validate(Task t) const;
    // Non-fatal findings, e.g. an l_max that is likely too small for the B_y range.
    std::vector<std::string> warnings(Task t) const;
    struct Entry {
        std::string key;
        std::string value;
        bool set = false;
    };
    // Every key with its effective value, in declaration order.
    std::vector<Entry> resolved() const;
    bool is_set(std::string_view key) const;

    std::vector<std::string> set_keys;
};

RunConfig parse_config(std::istream& in, const std::string& source = "<stream>");
RunConfig load_config(const std::string& path);

// Smallest l_max the heuristic considers safe for the largest B_y / smallest B_z
// of the run (displaced-oscillator estimate with z ≈ 13.5 r_B).
int recommended_l_max(const RunConfig& cfg);

} // namespace heliumjcm

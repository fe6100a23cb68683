#include "heliumjcm/tasks.hpp"

#include "heliumjcm/coupled.hpp"
#include "heliumjcm/dissipation.hpp"
#include "heliumjcm/errors.hpp"
#include "heliumjcm/jcm.hpp"
#include "heliumjcm/parallel.hpp"
#include "heliumjcm/vertical.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace heliumjcm {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string version() { return HELIUMJCM_VERSION; }

namespace {

std::string stem_of(const RunConfig& cfg, Task task) {
    const fs::path p(cfg.source);
    if (cfg.source.empty() || cfg.source.front() == '<')
        return std::string(to_string(task));
    return p.stem().string();
}

std::string num(double v, const char* f = "%.10g") {
    if (!std::isfinite(v))
        return "nan";
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text, TaskOutcome& out) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot write '" + path.string() + "'");
    f << text;
    out.files.push_back(path.string());
}

json material_json(const MaterialProperties& m) {
    return json{{"isotope", std::string(to_string(m.isotope))},
                {"rydberg_energy_meV", m.rydberg_energy / millielectronvolts(1.0)},
                {"bohr_radius_nm", m.bohr_radius * 1e9},
                {"lambda_J_m", m.lambda_coupling},
                {"epsilon_from_lambda", m.epsilon},
                {"barrier_height_eV", m.barrier_height / electronvolts(1.0)},
                {"surface_tension_N_per_m", m.surface_tension},
                {"mass_density_kg_per_m3", m.mass_density}};
}

json provenance(const RunConfig& cfg, Task task, int threads) {
    json config = json::object();
    json defaults = json::array();
    for (const auto& e : cfg.resolved()) {
        config[e.key] = e.value;
        if (!e.set)
            defaults.push_back(e.key);
    }
    const MaterialProperties mat = cfg.material();
    const LambdaConsistency lc = lambda_consistency(mat);
    return json{
        {"program", "heliumjcm"},
        {"version", version()},
        {"task", std::string(to_string(task))},
        {"config_source", cfg.source},
        {"threads", threads},
        {"resolved_config", config},
        {"defaults_used", defaults},
        {"material", material_json(mat)},
        {"lambda_consistency",
         {{"lambda_from_rydberg", lc.lambda_from_rydberg},
          {"lambda_from_literature_epsilon", lc.lambda_from_literature_epsilon},
          {"relative_deviation", lc.relative_deviation},
          {"within_one_percent", lc.within_one_percent}}},
        {"constants",
         {{"elementary_charge", constants::elementary_charge},
          {"planck", constants::planck},
          {"hbar", constants::hbar},
          {"electron_mass", constants::electron_mass},
          {"boltzmann", constants::boltzmann},
          {"vacuum_permittivity", constants::vacuum_permittivity}}},
        {"basis", {{"n_max", cfg.n_max}, {"l_max", cfg.l_max}, {"size", cfg.n_max * (cfg.l_max + 1)}}},
        {"grid",
         {{"z_max_rB", cfg.grid.z_max},
          {"n_points", cfg.grid.n_points},
          {"extrapolate_energies", cfg.grid.extrapolate_energies}}},
        {"energy_convention", "cyclotron zero-point energy subtracted"},
    };
}

json vertical_diagnostics(const VerticalSpectrum& vs) {
    json res = json::array();
    for (double r : truncation_report(vs))
        res.push_back(r);
    json e = json::array();
    for (int n = 1; n <= vs.n_max(); ++n)
        e.push_back(to_ghz(vs.energy(n)));
    return json{{"e_perp_V_per_cm", to_volts_per_cm(vs.e_perp)}, {"energies_GHz", e}, {"sum_rule_residuals", res}};
}

json convergence(const VerticalSpectrum& vs, const FieldConfiguration& cfg, const ProductBasis& basis) {
    const double drift = truncation_drift(vs, cfg, basis, 30);
    return json{{"b_z", cfg.b_z},
                {"b_y", cfg.b_y},
                {"l_max", basis.l_max()},
                {"l_max_compared", basis.l_max() + 30},
                {"max_drift_MHz_below_n4", to_ghz(drift) * 1e3},
                {"within_10_MHz", to_ghz(drift) * 1e3 < 10.0}};
}

json failures_json(const std::vector<PointFailure>& failures) {
    json a = json::array();
    for (const auto& f : failures) {
        a.push_back({{"sweep_index", f.sweep_index}, {"sweep_value", f.sweep_value}, {"kind", f.kind},
                     {"message", f.message}});
    }
    return a;
}

void finish(const fs::path& dir, const std::string& stem, json sidecar, TaskOutcome& out) {
    sidecar["failures"] = failures_json(out.failures);
    if (!out.failures.empty())
        write_text(dir / (stem + "_failures.json"), failures_json(out.failures).dump(2) + "\n", out);
    json files = json::array();
    for (const auto& f : out.files)
        files.push_back(fs::path(f).filename().string());
    sidecar["outputs"] = files;
    write_text(dir / (stem + ".json"), sidecar.dump(2) + "\n", out);
}

MapSpec map_spec(const RunConfig& cfg, int threads) {
    MapSpec spec;
    spec.material = cfg.material();
    spec.base = cfg.field;
    spec.axis = cfg.sweep->axis;
    spec.sweep = cfg.sweep->values();
    spec.e_min = cfg.e_min;
    spec.e_max = cfg.e_max;
    spec.e_points = cfg.e_points;
    spec.mw_frequency = cfg.mw_frequency;
    spec.broadening = cfg.broadening;
    spec.l_cut = cfg.l_cut;
    spec.n_max = cfg.n_max;
    spec.l_max = cfg.l_max;
    spec.grid = cfg.grid;
    spec.anchor_spacing = cfg.anchor_spacing;
    spec.min_moment_sq = cfg.min_moment_sq;
    spec.threads = threads;
    return spec;
}

void spectrum_sweep(const RunConfig& cfg, const fs::path& dir, const std::string& stem, int threads,
                    TaskOutcome& out, std::ostream& log) {
    const MaterialProperties mat = cfg.material();
    const VerticalSpectrum vs = solve_vertical(mat, cfg.field.e_perp, cfg.n_max, cfg.grid);
    const ProductBasis basis = cfg.basis();
    const std::vector<double> values = cfg.sweep->values();
    const FieldAxis axis = cfg.sweep->axis;

    std::vector<CoupledSpectrum> family(values.size());
    std::vector<std::string> errors(values.size());
    parallel_for(values.size(), threads, [&](std::size_t i) {
        FieldConfiguration c = cfg.field;
        (axis == FieldAxis::BZ ? c.b_z : c.b_y) = values[i];
        try {
            family[i] = solve_coupled(vs, c, basis);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    std::ostringstream csv;
    csv << (axis == FieldAxis::BY ? "b_y" : "b_z") << ",k,energy_GHz,dominant_n,dominant_l,dominant_weight\n";
    const double e1 = vs.energy(1);
    char buf[128];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!errors[i].empty()) {
            out.failures.push_back({static_cast<int>(i), values[i], "Error", errors[i]});
            continue;
        }
        const CoupledSpectrum& cs = family[i];
        for (int k = 0; k < std::min(cfg.levels, cs.size()); ++k) {
            const DominantComponent d = cs.dominant(k);
            std::snprintf(buf, sizeof buf, "%.6f,%d,%.6f,%d,%d,%.6f\n", values[i], k, to_ghz(cs.energy(k) - e1),
                          d.state.n, d.state.l, d.weight);
            csv << buf;
        }
    }
    write_text(dir / (stem + "_spectrum.csv"), csv.str(), out);

    json side = provenance(cfg, Task::SpectrumSweep, threads);
    side["energy_reference"] = "E_1 of the vertical problem at the configured E_perp";
    side["vertical"] = vertical_diagnostics(vs);
    FieldConfiguration worst = cfg.field;
    (axis == FieldAxis::BZ ? worst.b_z : worst.b_y) = axis == FieldAxis::BZ ? values.front() : values.back();
    if (worst.b_z > 0.0)
        side["convergence"] = convergence(vs, worst, basis);
    finish(dir, stem, side, out);
    log << "spectrum-sweep: " << values.size() << " points, " << cfg.levels << " levels\n";
}

void absorption(const RunConfig& cfg, const fs::path& dir, const std::string& stem, int threads, TaskOutcome& out,
                std::ostream& log) {
    const MapSpec spec = map_spec(cfg, threads);
    const AbsorptionMap map = absorption_map(spec);
    out.failures = map.failures;

    std::ostringstream csv;
    write_map_csv(map, csv);
    write_text(dir / (stem + "_map.csv"), csv.str(), out);
    std::ostringstream lines;
    write_lines_csv(map, lines);
    write_text(dir / (stem + "_lines.csv"), lines.str(), out);

    json side = provenance(cfg, Task::AbsorptionMap, threads);
    side["sweep_axis"] = cfg.sweep->axis == FieldAxis::BY ? "b_y" : "b_z";
    side["mw_frequency_GHz"] = map.mw_frequency;
    side["raw_normalization_m2_per_V_per_cm"] = map.normalization;
    side["anchor_spacing_V_per_cm"] = spec.anchor_spacing;
    json widths = json::array();
    for (std::size_t s = 0; s < map.widths.size(); ++s) {
        const WidthBreakdown& w = map.widths[s];
        widths.push_back({{"sweep_value", map.sweep[s]},
                          {"base_GHz", w.base},
                          {"many_electron_GHz", w.many_electron},
                          {"thermal_GHz", w.thermal},
                          {"total_GHz", w.total},
                          {"low_field_regime", w.low_field_regime}});
    }
    side["widths"] = widths;
    json traces = json::array();
    for (const TransitionLine& l : map.lines) {
        traces.push_back({{"sweep_value", l.sweep_value},
                          {"e_perp_V_per_cm", l.e_perp},
                          {"stark_slope_GHz_cm_per_V", l.stark_slope},
                          {"initial", {l.initial.n, l.initial.l}},
                          {"thermal_weight", l.thermal_weight},
                          {"final_dominant", {l.final_dominant.n, l.final_dominant.l}},
                          {"final_weight", l.final_weight},
                          {"moment_sq_m2", l.moment_sq},
                          {"sideband_order", l.sideband_order}});
    }
    side["lines"] = traces;

    if (cfg.interference) {
        const MaterialProperties mat = cfg.material();
        const VerticalSpectrum vs = solve_vertical(mat, cfg.field.e_perp, cfg.n_max, cfg.grid);
        const auto scan = interference_scan(vs, cfg.field, cfg.basis(), cfg.sweep->values(), threads);
        std::ostringstream icsv;
        icsv << "b_y,z_upper_analytic_rB,z_lower_analytic_rB,upper_moment_sq_rB2,lower_moment_sq_rB2,"
                "upper_energy_GHz,lower_energy_GHz\n";
        const double rb = vs.units.length;
        char buf[192];
        for (const auto& p : scan) {
            std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6e,%.6e,%.6f,%.6f\n", p.b_y, p.analytic.z_upper / rb,
                          p.analytic.z_lower / rb, p.upper_moment_sq / (rb * rb), p.lower_moment_sq / (rb * rb),
                          p.upper_energy_ghz, p.lower_energy_ghz);
            icsv << buf;
        }
        write_text(dir / (stem + "_interference.csv"), icsv.str(), out);
        side["interference"] = {
            {"e_perp_V_per_cm", to_volts_per_cm(vs.e_perp)},
            {"b_z", cfg.field.b_z},
            {"z22_rB", vs.z_matrix(1, 1)},
            {"z21_rB", vs.z_matrix(1, 0)},
            {"z31_rB", vs.z_matrix(2, 0)},
            {"z23_rB", vs.z_matrix(1, 2)},
            {"analytic_cancellation_b_y",
             cancellation_field(vs.z_elem(2, 2), vs.z_elem(3, 1) / vs.z_elem(2, 1), cfg.field.b_z)},
            {"diagonalized_upper_minimum_b_y", upper_branch_minimum(scan)}};
    }
    finish(dir, stem, side, out);
    log << "absorption-map: " << map.sweep.size() << " x " << map.e_perp.size() << " grid, " << map.lines.size()
        << " line positions, " << map.failures.size() << " failed points\n";
}

void shifts(const RunConfig& cfg, const fs::path& dir, const std::string& stem, int threads, TaskOutcome& out,
            std::ostream& log) {
    const MaterialProperties mat = cfg.material();
    const VerticalSpectrum vs = solve_vertical(mat, cfg.field.e_perp, cfg.n_max, cfg.grid);
    const ProductBasis basis = cfg.basis();
    const std::vector<double> b_y = cfg.sweep->values();

    struct Row {
        double d0 = std::numeric_limits<double>::quiet_NaN();
        double d1 = std::numeric_limits<double>::quiet_NaN();
        double d0_direct = std::numeric_limits<double>::quiet_NaN();
        double d0_diag = 0.0;
        double d1_diag = 0.0;
        std::string error;
        std::string kind;
    };
    std::vector<Row> rows(b_y.size());
    parallel_for(b_y.size(), threads, [&](std::size_t i) {
        FieldConfiguration c = cfg.field;
        c.b_y = b_y[i];
        Row& r = rows[i];
        r.d0_diag = diagonalized_transition_shift(vs, c, basis, 0);
        r.d1_diag = diagonalized_transition_shift(vs, c, basis, 1);
        try {
            r.d0 = transition_shift(vs, c, 0);
            r.d1 = transition_shift(vs, c, 1);
            r.d0_direct = lamb_shift(vs, c);
        } catch (const NearResonance& e) {
            r.error = e.what();
            r.kind = "NearResonance";
        }
    });

    std::ostringstream csv;
    csv << "b_y,delta0_perturbative_GHz,delta1_perturbative_GHz,delta0_direct_GHz,delta0_diagonalized_GHz,"
           "delta1_diagonalized_GHz\n";
    for (std::size_t i = 0; i < b_y.size(); ++i) {
        const Row& r = rows[i];
        csv << num(b_y[i], "%.6f") << ',' << num(r.d0, "%.8f") << ',' << num(r.d1, "%.8f") << ','
            << num(r.d0_direct, "%.8f") << ',' << num(r.d0_diag, "%.8f") << ',' << num(r.d1_diag, "%.8f") << '\n';
        if (!r.error.empty())
            out.failures.push_back({static_cast<int>(i), b_y[i], r.kind, r.error});
    }
    write_text(dir / (stem + "_shifts.csv"), csv.str(), out);

    json side = provenance(cfg, Task::Shifts, threads);
    side["vertical"] = vertical_diagnostics(vs);
    FieldConfiguration worst = cfg.field;
    worst.b_y = b_y.back();
    side["convergence"] = convergence(vs, worst, basis);
    side["resonance_guard_factor"] = ResonanceGuard{}.factor;
    finish(dir, stem, side, out);
    log << "shifts: " << b_y.size() << " B_y points\n";
}

void crossings(const RunConfig& cfg, const fs::path& dir, const std::string& stem, int threads, TaskOutcome& out,
               std::ostream& log) {
    const MaterialProperties mat = cfg.material();
    const VerticalSpectrum vs = solve_vertical(mat, cfg.field.e_perp, cfg.n_max, cfg.grid);
    const ProductBasis basis = cfg.basis();

    std::ostringstream csv;
    csv << "a_n,a_l,b_n,b_l,l_offset,b_y,b_z_crossing,b_z_min_gap,gap_GHz,two_g_sqrt_l_GHz,gap_ratio\n";
    json results = json::array();
    for (const CrossingPair& p : cfg.pairs) {
        const std::string label = std::to_string(p.a.n) + "," + std::to_string(p.a.l) + ":" + std::to_string(p.b.n) +
                                  "," + std::to_string(p.b.l);
        json entry{{"pair", label}};
        double bz = 0.0;
        try {
            bz = find_crossing(vs, p.a, p.b, cfg.b_z_min, cfg.b_z_max, 1e-6);
        } catch (const NoCrossingInRange& e) {
            entry["error"] = e.what();
            results.push_back(entry);
            out.failures.push_back({static_cast<int>(results.size()) - 1, 0.0, "NoCrossingInRange", e.what()});
            continue;
        }
        entry["b_z_crossing"] = bz;

        struct Job {
            int l_offset;
            double b_y;
        };
        std::vector<Job> jobs;
        for (double by : cfg.gap_b_y)
            jobs.push_back({0, by});
        for (int j = 1; j < cfg.gap_l_count; ++j)
            jobs.push_back({j, cfg.family_b_y});
        if (cfg.gap_l_count > 1 && std::find(cfg.gap_b_y.begin(), cfg.gap_b_y.end(), cfg.family_b_y) == cfg.gap_b_y.end())
            jobs.push_back({0, cfg.family_b_y});

        struct JobResult {
            GapResult gap;
            double two_g = 0.0;
            std::string error;
        };
        std::vector<JobResult> jr(jobs.size());
        const int n_hi = p.a.l > p.b.l ? p.a.n : p.b.n;  // state carrying the extra Landau quantum
        const int n_lo = p.a.l > p.b.l ? p.b.n : p.a.n;
        const int l_base = std::min(p.a.l, p.b.l);
        parallel_for(jobs.size(), threads, [&](std::size_t i) {
            FieldConfiguration c = cfg.field;
            c.b_y = jobs[i].b_y;
            c.b_z = bz;
            const int j = jobs[i].l_offset;
            const BasisState a{p.a.n, p.a.l + j};
            const BasisState b{p.b.n, p.b.l + j};
            try {
                jr[i].gap = minimum_gap_scan(vs, c, basis, a, b, 0.9 * bz, 1.1 * bz, cfg.gap_steps, 1);
                jr[i].two_g = 2.0 * std::abs(to_ghz(coupling_constant(vs, c, n_hi, n_lo))) *
                              std::sqrt(static_cast<double>(l_base + j + 1));
            } catch (const Error& e) {
                jr[i].error = e.what();
            }
        });

        json gaps = json::array();
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const JobResult& r = jr[i];
            if (!r.error.empty()) {
                out.failures.push_back({static_cast<int>(i), jobs[i].b_y, "Error", r.error});
                continue;
            }
            const double ratio = r.two_g > 0.0 ? r.gap.gap_ghz / r.two_g : 0.0;
            csv << p.a.n << ',' << p.a.l << ',' << p.b.n << ',' << p.b.l << ',' << jobs[i].l_offset << ',' << num(jobs[i].b_y, "%.6f") << ',' << num(bz, "%.6f") << ','
                << num(r.gap.b_z, "%.6f") << ',' << num(r.gap.gap_ghz, "%.6f") << ',' << num(r.two_g, "%.6f") << ','
                << num(ratio, "%.6f") << '\n';
            gaps.push_back({{"l_offset", jobs[i].l_offset},
                            {"b_y", jobs[i].b_y},
                            {"b_z_min_gap", r.gap.b_z},
                            {"gap_GHz", r.gap.gap_ghz},
                            {"two_g_sqrt_l_GHz", r.two_g}});
        }
        entry["gaps"] = gaps;
        results.push_back(entry);
    }
    write_text(dir / (stem + "_crossings.csv"), csv.str(), out);

    json side = provenance(cfg, Task::Crossings, threads);
    side["vertical"] = vertical_diagnostics(vs);
    side["crossings"] = results;
    finish(dir, stem, side, out);
    log << "crossings: " << cfg.pairs.size() << " pairs\n";
}

void rates(const RunConfig& cfg, const fs::path& dir, const std::string& stem, int threads, TaskOutcome& out,
           std::ostream& log) {
    const MaterialProperties mat = cfg.material();
    const VerticalSpectrum vs = solve_vertical(mat, cfg.field.e_perp, std::max(cfg.n_max, 2), cfg.grid);
    FieldConfiguration c = cfg.field;
    std::string b_z_source = "config";
    if (!cfg.b_z_set) {
        c.b_z = find_crossing(vs, {1, 1}, {2, 0}, cfg.b_z_min, cfg.b_z_max, 1e-9);
        b_z_source = "(1,1)/(2,0) crossing";
    }
    const RipplonBath bath = RipplonBath::of(mat, c.temperature);
    const RateOptions opts{cfg.finite_temperature};
    const StrongCouplingReport r = strong_coupling_report(vs, bath, c, cfg.nu_0, 1, 2, opts);

    json side = provenance(cfg, Task::Rates, threads);
    side["vertical"] = vertical_diagnostics(vs);
    side["b_z"] = c.b_z;
    side["b_z_source"] = b_z_source;
    side["b_y"] = c.b_y;
    side["rates"] = {
        {"g12_GHz", r.g_ghz},
        {"q_tilde_per_cm", r.q_tilde * 1e-2},
        {"gamma_21_per_s", r.gamma_vertical},
        {"gamma_11_per_s", r.gamma_cyclotron},
        {"gamma_ratio_11_over_21", r.gamma_cyclotron / r.gamma_vertical},
        {"dvdz_ratio_11_over_22", vs.dvdz(1) / vs.dvdz(2)},
        {"dvdz_11_over_wall_slope", vs.dvdz(1) / vs.dvdz_from_wall(1)},
        {"nu_B_per_s", r.nu_b},
        {"nu_0_per_s", cfg.nu_0},
        {"coupling_over_decay", r.ratio},
        {"coupling_over_dephasing", r.dephasing_ratio},
        {"d_gamma_21_d_V0_per_s_per_eV", r.gamma_vertical_per_ev},
        {"finite_temperature", cfg.finite_temperature}};

    std::ostringstream csv;
    csv << "quantity,value\n";
    csv << "b_z_T," << num(c.b_z) << '\n';
    csv << "g12_GHz," << num(r.g_ghz) << '\n';
    csv << "q_tilde_per_cm," << num(r.q_tilde * 1e-2) << '\n';
    csv << "gamma_21_per_s," << num(r.gamma_vertical) << '\n';
    csv << "gamma_11_per_s," << num(r.gamma_cyclotron) << '\n';
    csv << "nu_B_per_s," << num(r.nu_b) << '\n';
    csv << "coupling_over_decay," << num(r.ratio) << '\n';
    write_text(dir / (stem + "_rates.csv"), csv.str(), out);
    finish(dir, stem, side, out);
    log << "rates: Gamma_21 = " << num(r.gamma_vertical, "%.3e") << " 1/s, Gamma_11 = "
        << num(r.gamma_cyclotron, "%.3e") << " 1/s, g/h = " << num(r.g_ghz, "%.3f") << " GHz\n";
}

void self_test(const RunConfig& cfg, const fs::path& dir, const std::string& stem, int threads, TaskOutcome& out,
               std::ostream& log) {
    const auto checks = run_self_test_checks(cfg);
    json side = provenance(cfg, Task::SelfTest, threads);
    json arr = json::array();
    for (const auto& c : checks) {
        log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        if (!c.pass)
            out.self_test_failed = true;
    }
    side["checks"] = arr;
    finish(dir, stem, side, out);
}

} // namespace

std::vector<SelfTestCheck> run_self_test_checks(const RunConfig& cfg) {
    std::vector<SelfTestCheck> checks;
    auto add = [&](std::string name, bool pass, std::string detail) {
        checks.push_back({std::move(name), pass, std::move(detail)});
    };
    const MaterialProperties mat = cfg.material();

    const VerticalSpectrum zero = solve_vertical(mat, 0.0, 6, cfg.grid);
    double worst_e = 0.0;
    double worst_z = 0.0;
    for (int n = 1; n <= 4; ++n) {
        worst_e = std::max(worst_e, std::abs(zero.energies[n - 1] * n * n + 1.0));
        worst_z = std::max(worst_z, std::abs(zero.z_matrix(n - 1, n - 1) / (1.5 * n * n) - 1.0));
    }
    add("hydrogenic energies", worst_e < 1e-3, "max relative error " + num(worst_e, "%.3e"));
    add("hydrogenic <z>", worst_z < 1e-3, "max relative error " + num(worst_z, "%.3e"));

    const VerticalSpectrum s6 = solve_vertical(mat, volts_per_cm(15.0), 6, cfg.grid);
    const VerticalSpectrum s12 = solve_vertical(mat, volts_per_cm(15.0), 12, cfg.grid);
    const double r6 = truncation_report(s6)[0];
    const double r12 = truncation_report(s12)[0];
    add("sum rule decreases with n_max", r12 < r6, "n=1 residual " + num(r6, "%.3e") + " -> " + num(r12, "%.3e"));

    const ProductBasis basis(6, 20);
    FieldConfiguration fan = FieldConfiguration::lab(15.0, 0.8, 0.0);
    const CoupledSpectrum cs0 = solve_coupled(s6, fan, basis);
    std::vector<double> expected;
    const double hw = constants::hbar * cyclotron_frequency(fan.b_z) / s6.units.energy;
    for (int n = 1; n <= 6; ++n)
        for (int l = 0; l <= 20; ++l)
            expected.push_back(s6.energies[n - 1] + hw * l);
    std::sort(expected.begin(), expected.end());
    double fan_err = 0.0;
    for (int k = 0; k < cs0.size(); ++k)
        fan_err = std::max(fan_err, std::abs(cs0.eigenvalues[k] - expected[static_cast<std::size_t>(k)]));
    add("B_y = 0 fan", fan_err < 1e-10, "max deviation " + num(fan_err, "%.3e") + " R_e");

    FieldConfiguration tilted = FieldConfiguration::lab(15.0, 0.8, 0.3);
    const Eigen::MatrixXd h = assemble_hamiltonian(s6, tilted, basis);
    const CoupledSpectrum cs = diagonalize(h, basis, tilted, s6.units);
    const double ortho =
        (cs.eigenvectors.transpose() * cs.eigenvectors - Eigen::MatrixXd::Identity(cs.size(), cs.size()))
            .cwiseAbs()
            .maxCoeff();
    add("orthonormal eigenvectors", ortho < 1e-8, "max |V^T V - I| " + num(ortho, "%.3e"));
    const double trace_err = std::abs(cs.eigenvalues.sum() - h.trace()) / std::abs(h.trace());
    add("trace preserved", trace_err < 1e-8, "relative error " + num(trace_err, "%.3e"));
    return checks;
}

TaskOutcome run_task(Task task, const RunConfig& cfg, const std::string& out_dir, int threads, std::ostream& log) {
    cfg.validate(task);
    for (const auto& w : cfg.warnings(task))
        log << "warning: " << w << '\n';
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const std::string stem = stem_of(cfg, task);
    TaskOutcome out;
    switch (task) {
    case Task::SpectrumSweep: spectrum_sweep(cfg, dir, stem, threads, out, log); break;
    case Task::AbsorptionMap: absorption(cfg, dir, stem, threads, out, log); break;
    case Task::Shifts: shifts(cfg, dir, stem, threads, out, log); break;
    case Task::Crossings: crossings(cfg, dir, stem, threads, out, log); break;
    case Task::Rates: rates(cfg, dir, stem, threads, out, log); break;
    case Task::SelfTest: self_test(cfg, dir, stem, threads, out, log); break;
    }
    return out;
}

} // namespace heliumjcm

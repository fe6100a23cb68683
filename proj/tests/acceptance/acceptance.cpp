// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "heliumjcm/config.hpp"
#include "heliumjcm/coupled.hpp"
#include "heliumjcm/dissipation.hpp"
#include "heliumjcm/jcm.hpp"
#include "heliumjcm/spectroscopy.hpp"
#include "heliumjcm/units.hpp"
#include "heliumjcm/vertical.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace heliumjcm;

namespace {

struct Result {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty())
            detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string f(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

const MaterialProperties he3 = material_for(Isotope::He3);

// E⊥ (V/cm) where (E_n' − E_n)/h equals target_ghz, by bisection.
double field_for_frequency(int n, int np, double target_ghz, double lo, double hi) {
    auto g = [&](double e) {
        return to_ghz(solve_vertical(he3, volts_per_cm(e), std::max(n, np) + 1).transition(n, np)) - target_ghz;
    };
    double glo = g(lo);
    for (int i = 0; i < 50 && hi - lo > 1e-5; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// E⊥ (V/cm) where the (2,1)/(3,0) crossing sits at b_z.
double field_for_crossing(double b_z) {
    auto g = [&](double e) {
        return find_crossing(solve_vertical(he3, volts_per_cm(e), 4), {2, 1}, {3, 0}, 0.2, 5.0, 1e-7) - b_z;
    };
    double lo = 15.0;
    double hi = 30.0;
    double glo = g(lo);
    for (int i = 0; i < 40 && hi - lo > 1e-5; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Result c1_hydrogenic() {
    Result r;
    const auto t0 = std::chrono::steady_clock::now();
    const VerticalSpectrum vs = solve_vertical(he3, 0.0, 6);
    double e_err = 0.0;
    double z_err = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const double exact = -he3.rydberg_energy / (n * n);
        e_err = std::max(e_err, std::abs(vs.energy(n) / exact - 1.0));
        z_err = std::max(z_err, std::abs(vs.z_elem(n, n) / (1.5 * n * n * he3.bohr_radius) - 1.0));
    }
    const double t = seconds_since(t0);
    r.require(e_err < 1e-3, "max |dE/E| " + f("%.2e", e_err));
    r.require(z_err < 1e-3, "max |dz/z| " + f("%.2e", z_err));
    r.require(t < 5.0, "runtime " + f("%.2f", t) + " s");
    return r;
}

Result c2_stark() {
    Result r;
    const auto t0 = std::chrono::steady_clock::now();
    const double e90 = field_for_frequency(1, 2, 90.0, 0.0, 60.0);
    const double kappa = stark_slope(he3, volts_per_cm(e90), 1, 2);
    const double kappa23 = stark_slope(he3, volts_per_cm(23.0), 1, 2);
    const double t = seconds_since(t0);
    r.require(std::abs(e90 - 23.0) <= 1.5, "E(90 GHz) " + f("%.2f", e90) + " V/cm vs 23 +- 1.5");
    r.require(std::abs(kappa - 0.74) <= 0.04, "kappa there " + f("%.3f", kappa) + " vs 0.74 +- 0.04");
    r.detail += "; kappa(23 V/cm) " + f("%.3f", kappa23);
    r.require(t < 10.0, "runtime " + f("%.2f", t) + " s");
    return r;
}

Result c3_shifts() {
    Result r;
    const auto t0 = std::chrono::steady_clock::now();
    const VerticalSpectrum vs = solve_vertical(he3, volts_per_cm(15.0), 6);
    const ProductBasis basis(6, 50);
    std::vector<double> b_y;
    for (int i = 1; i <= 12; ++i)
        b_y.push_back(0.025 * i);
    double worst0 = 0.0;
    double worst1 = 0.0;
    double worst1_at = 0.0;
    bool signs = true;
    for (double by : b_y) {
        const FieldConfiguration cfg = FieldConfiguration::lab(15.0, 0.65, by);
        const double d0 = diagonalized_transition_shift(vs, cfg, basis, 0);
        const double d1 = diagonalized_transition_shift(vs, cfg, basis, 1);
        const double p0 = transition_shift(vs, cfg, 0);
        const double p1 = transition_shift(vs, cfg, 1);
        const double e0 = std::abs(p0 - d0) / std::abs(d0);
        const double e1 = std::abs(p1 - d1) / std::abs(d0);
        worst0 = std::max(worst0, e0);
        if (e1 > worst1) {
            worst1 = e1;
            worst1_at = by;
        }
        signs = signs && d0 > 0.0 && d1 < 0.0 && p0 > 0.0 && p1 < 0.0;
    }
    const double t = seconds_since(t0);
    r.require(worst0 <= 0.10, "max |dDelta0|/|Delta0| " + f("%.4f", worst0));
    r.require(worst1 <= 0.10, "max |dDelta1|/|Delta0| " + f("%.3f", worst1) + " at B_y " + f("%.3f", worst1_at));
    r.require(signs, "Delta0 > 0, Delta1 < 0");
    r.require(t < 60.0, "runtime " + f("%.1f", t) + " s");
    return r;
}

Result c4_crossings() {
    Result r;
    const VerticalSpectrum v20 = solve_vertical(he3, volts_per_cm(20.0), 4);
    const double b23 = find_crossing(v20, {2, 1}, {3, 0}, 0.2, 4.0);
    const double e120 = field_for_frequency(1, 3, 120.5, 10.0, 40.0);
    const VerticalSpectrum v120 = solve_vertical(he3, volts_per_cm(e120), 4);
    const double b23_alt = find_crossing(v120, {2, 1}, {3, 0}, 0.2, 4.0);
    const VerticalSpectrum v15 = solve_vertical(he3, volts_per_cm(15.0), 4);
    const double b12 = find_crossing(v15, {1, 1}, {2, 0}, 0.2, 6.0);
    r.require(std::abs(b23 - 1.18) <= 0.03, "(2,1)/(3,0) at 20 V/cm: " + f("%.4f", b23) + " T vs 1.18 +- 0.03");
    r.detail += "; at E(1->3 = 120.5 GHz) = " + f("%.2f", e120) + " V/cm: " + f("%.4f", b23_alt) + " T";
    r.require(std::abs(b12 - 2.82) <= 0.08, "(1,1)/(2,0) at 15 V/cm: " + f("%.4f", b12) + " T vs 2.82 +- 0.08");
    return r;
}

Result c5_gap() {
    Result r;
    const VerticalSpectrum vs = solve_vertical(he3, volts_per_cm(20.0), 6);
    const ProductBasis basis(6, 50);
    const double bz = find_crossing(vs, {2, 1}, {3, 0}, 0.2, 4.0, 1e-7);
    double worst = 0.0;
    for (double by : {0.05, 0.1, 0.15, 0.2}) {
        FieldConfiguration cfg = FieldConfiguration::lab(20.0, bz, by);
        const GapResult g = minimum_gap_scan(vs, cfg, basis, {2, 1}, {3, 0}, 0.9 * bz, 1.1 * bz, 41, threads());
        const double two_g = 2.0 * std::abs(to_ghz(coupling_constant(vs, cfg, 2, 3)));
        worst = std::max(worst, std::abs(g.gap_ghz / two_g - 1.0));
    }
    r.require(worst <= 0.10, "max |gap/2g - 1| " + f("%.4f", worst));

    double gap0 = 0.0;
    double worst_l = 0.0;
    for (int l = 0; l <= 3; ++l) {
        FieldConfiguration cfg = FieldConfiguration::lab(20.0, bz, 0.1);
        const GapResult g =
            minimum_gap_scan(vs, cfg, basis, {2, l + 1}, {3, l}, 0.9 * bz, 1.1 * bz, 41, threads());
        if (l == 0)
            gap0 = g.gap_ghz;
        worst_l = std::max(worst_l, std::abs(g.gap_ghz / (gap0 * std::sqrt(l + 1.0)) - 1.0));
    }
    r.require(worst_l <= 0.05, "max |gap_l/(gap_0 sqrt(l+1)) - 1| " + f("%.4f", worst_l));
    return r;
}

Result c6_interference() {
    Result r;
    const double z22 = 3.91 * he3.bohr_radius;
    const double b_star = cancellation_field(z22, 0.5, 1.18);
    r.require(std::abs(b_star - 0.49) <= 0.02, "leading-order zero " + f("%.4f", b_star) + " T");

    const double e_res = field_for_crossing(1.18);
    const VerticalSpectrum vs = solve_vertical(he3, volts_per_cm(e_res), 6);
    std::vector<double> b_y;
    for (int i = 0; i <= 100; ++i)
        b_y.push_back(0.01 * i);
    const FieldConfiguration base = FieldConfiguration::lab(e_res, 1.18, 0.0);
    const auto scan = interference_scan(vs, base, ProductBasis(6, 50), b_y, threads());
    const double b_min = upper_branch_minimum(scan);
    r.require(b_min >= 0.35 && b_min <= 0.55,
              "diagonalized upper |z|^2 minimum " + f("%.3f", b_min) + " T at E_perp " + f("%.2f", e_res) + " V/cm");
    return r;
}

Result c7_thermal() {
    Result r;
    const FieldConfiguration cfg = FieldConfiguration::lab(23.0, 0.584, 0.0, 0.33);
    const double p0 = thermal_populations(cfg, 40)[0];
    const double gap_k = constants::hbar * cyclotron_frequency(0.584) / constants::boltzmann;
    r.require(std::abs(p0 - 0.91) <= 0.01, "P(l=0) " + f("%.4f", p0));
    r.require(std::abs(gap_k - 0.78) <= 0.01, "hbar w_c/k_B " + f("%.4f", gap_k) + " K");
    return r;
}

Result c8_dissipation() {
    Result r;
    const VerticalSpectrum vs = solve_vertical(he3, volts_per_cm(15.0), 4);
    const RipplonBath bath = RipplonBath::of(he3, 0.1);
    const double q = resonant_wavenumber(bath, vs.transition(1, 2)) * 1e-2;
    r.require(std::abs(q / 3e7 - 1.0) <= 0.10, "q~ " + f("%.3e", q) + " 1/cm");

    const FieldConfiguration cfg = FieldConfiguration::lab(15.0, 2.82, 0.0, 0.1);
    const double g21 = two_ripplon_rate(vs, bath, cfg, {2, 0}, {1, 0});
    const double g11 = two_ripplon_rate(vs, bath, cfg, {1, 1}, {1, 0});
    r.require(g21 >= 6e5 / 1.5 && g21 <= 6e5 * 1.5, "Gamma21 " + f("%.3e", g21) + " 1/s");
    r.require(g11 >= 1.4e6 / 1.5 && g11 <= 1.4e6 * 1.5, "Gamma11 " + f("%.3e", g11) + " 1/s");

    // Ratio at the exact (1,1)/(2,0) crossing, where both releases equal E2 − E1.
    FieldConfiguration at = cfg;
    at.b_z = find_crossing(vs, {1, 1}, {2, 0}, 0.5, 6.0, 1e-12);
    const double ratio = two_ripplon_rate(vs, bath, at, {1, 1}, {1, 0}) / two_ripplon_rate(vs, bath, at, {2, 0}, {1, 0});
    const double expected = vs.dvdz(1) / vs.dvdz(2);
    r.require(std::abs(ratio / expected - 1.0) < 1e-9,
              "Gamma11/Gamma21 " + f("%.6f", ratio) + " vs dvdz ratio " + f("%.6f", expected));

    const double nu_b = scba_elastic_rate(1e6, FieldConfiguration::lab(0.0, 2.2, 0.0));
    r.require(std::abs(nu_b / 5e8 - 1.0) <= 0.10, "nu_B " + f("%.3e", nu_b) + " 1/s");
    return r;
}

bool run_cli(const std::string& config, const std::string& out, int threads_n) {
    const std::string cmd = std::string(HELIUMJCM_CLI) + " spectrum-sweep --config " + config + " --out " + out +
                            " --threads " + std::to_string(threads_n) + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Result c9_properties() {
    Result r;
    const VerticalSpectrum vs = solve_vertical(he3, volts_per_cm(15.0), 6);
    const ProductBasis basis(6, 50);
    const FieldConfiguration tilted = FieldConfiguration::lab(15.0, 0.65, 0.3);
    const Eigen::MatrixXd h = assemble_hamiltonian(vs, tilted, basis);
    const CoupledSpectrum cs = diagonalize(h, basis, tilted, vs.units);
    const double herm = (h - h.transpose()).cwiseAbs().maxCoeff();
    const double ortho =
        (cs.eigenvectors.transpose() * cs.eigenvectors - Eigen::MatrixXd::Identity(cs.size(), cs.size()))
            .cwiseAbs()
            .maxCoeff();
    r.require(herm == 0.0 && ortho < 1e-8, "orthonormality " + f("%.1e", ortho));
    const double trace = std::abs(cs.eigenvalues.sum() - h.trace()) / std::abs(h.trace());
    r.require(trace < 1e-8, "trace " + f("%.1e", trace));

    const FieldConfiguration flat = FieldConfiguration::lab(15.0, 0.65, 0.0);
    const CoupledSpectrum c0 = solve_coupled(vs, flat, basis);
    std::vector<double> fan;
    const double hw = constants::hbar * cyclotron_frequency(0.65) / vs.units.energy;
    for (int n = 1; n <= 6; ++n)
        for (int l = 0; l <= 50; ++l)
            fan.push_back(vs.energies[n - 1] + hw * l);
    std::sort(fan.begin(), fan.end());
    double fan_err = 0.0;
    for (int k = 0; k < c0.size(); ++k)
        fan_err = std::max(fan_err, std::abs(c0.eigenvalues[k] - fan[static_cast<std::size_t>(k)]));
    r.require(fan_err < 1e-10, "B_y=0 fan " + f("%.1e", fan_err));

    double prev = 1.0;
    bool decreasing = true;
    for (int n_max : {6, 10, 20}) {
        const VerticalSpectrum v = solve_vertical(he3, volts_per_cm(15.0), n_max);
        const FieldConfiguration c = FieldConfiguration::lab(15.0, 0.65, 0.2);
        const double res = bethe_cancellation_check(v, c, 1, 0).residual;
        decreasing = decreasing && res < prev;
        prev = res;
    }
    r.require(decreasing, "Bethe residual decreasing (n_max 20: " + f("%.1e", prev) + ")");

    double drift = 0.0;
    const double e_res = 21.0;
    const VerticalSpectrum vr = solve_vertical(he3, volts_per_cm(e_res), 6);
    const VerticalSpectrum v23 = solve_vertical(he3, volts_per_cm(23.0), 6);
    drift = std::max(drift, truncation_drift(vs, tilted, basis, 30));
    drift = std::max(drift, truncation_drift(vr, FieldConfiguration::lab(e_res, 1.18, 1.0), basis, 30));
    drift = std::max(drift, truncation_drift(v23, FieldConfiguration::lab(23.0, 0.584, 0.6), basis, 30));
    r.require(to_ghz(drift) * 1e3 < 10.0, "l_max 50->80 drift " + f("%.3f", to_ghz(drift) * 1e3) + " MHz");

    double hf = 0.0;
    const double d = volts_per_cm(0.01);
    const VerticalSpectrum vp = solve_vertical(he3, volts_per_cm(15.0) + d, 4);
    const VerticalSpectrum vm = solve_vertical(he3, volts_per_cm(15.0) - d, 4);
    for (int n = 1; n <= 4; ++n) {
        const double slope = (vp.energy(n) - vm.energy(n)) / (2.0 * d);
        hf = std::max(hf, std::abs(slope / (constants::elementary_charge * vs.z_elem(n, n)) - 1.0));
    }
    r.require(hf < 0.005, "Hellmann-Feynman " + f("%.1e", hf));

    const auto tmp = std::filesystem::temp_directory_path() / "heliumjcm_acceptance";
    std::filesystem::remove_all(tmp);
    std::filesystem::create_directories(tmp);
    const auto cfg = tmp / "det.cfg";
    std::ofstream(cfg) << "[field]\ne_perp = 15\nb_y = 0.2\n[sweep]\naxis = b_z\nstart = 0.5\nstop = 3\npoints = 26\n"
                          "[basis]\nl_max = 30\n";
    const bool ran = run_cli(cfg.string(), (tmp / "a").string(), 1) && run_cli(cfg.string(), (tmp / "b").string(), 4);
    const std::string a = slurp(tmp / "a" / "det_spectrum.csv");
    const std::string b = slurp(tmp / "b" / "det_spectrum.csv");
    r.require(ran && !a.empty() && a == b, "CLI CSV byte-identical across runs and thread counts");
    return r;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"1 hydrogenic spectrum", c1_hydrogenic},
        {"2 Stark calibration", c2_stark},
        {"3 Lamb and light shifts", c3_shifts},
        {"4 uncoupled crossings", c4_crossings},
        {"5 avoided-crossing gap", c5_gap},
        {"6 interference cancellation", c6_interference},
        {"7 thermal populations", c7_thermal},
        {"8 dissipation", c8_dissipation},
        {"9 property suites", c9_properties},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Result r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << name << "  (" << r.detail << ")" << std::endl;
        failed += r.pass ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}

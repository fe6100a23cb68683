#include "heliumjcm/jcm.hpp"

#include "heliumjcm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace heliumjcm {

namespace {

double hbar_omega_c(const FieldConfiguration& cfg) { return constants::hbar * cyclotron_frequency(cfg.b_z); }

double diamagnetic_scale(const FieldConfiguration& cfg) {
    const double wy = cyclotron_frequency(cfg.b_y);
    return 0.5 * constants::electron_mass * wy * wy;
}

void check_index(const VerticalSpectrum& vs, int n) {
    if (n < 1 || n > vs.n_max())
        throw BasisMismatch("Rydberg index " + std::to_string(n) + " outside the vertical spectrum");
}

void guard_denominator(double denom, double g, ResonanceGuard guard, int n, int n_prime) {
    if (std::abs(denom) <= guard.factor * std::abs(g)) {
        throw NearResonance("perturbative shift too close to resonance between n=" + std::to_string(n) +
                            " and n'=" + std::to_string(n_prime));
    }
}

} // namespace

double coupling_constant(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n, int n_prime) {
    if (!(cfg.b_z > 0.0))
        throw DegenerateField("coupling constant needs B_z > 0");
    check_index(vs, n);
    check_index(vs, n_prime);
    const double wc = cyclotron_frequency(cfg.b_z);
    const double wy = cyclotron_frequency(cfg.b_y);
    return std::sqrt(0.5 * constants::hbar * constants::electron_mass * wc) * wy * vs.z_elem(n, n_prime);
}

double renormalized_energy(const VerticalSpectrum& vs, const FieldConfiguration& cfg, BasisState s) {
    check_index(vs, s.n);
    return vs.energy(s.n) + hbar_omega_c(cfg) * s.l + diamagnetic_scale(cfg) * vs.z2_elem(s.n, s.n);
}

double DressedPair::quoted_mixing_angle() const {
    const double l1 = static_cast<double>(lower_bare.l + 1);
    return std::atan(g * std::sqrt(l1) / (2.0 * e_delta));
}

DressedPair dressed_pair(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n, int n_prime, int l) {
    if (l < 0)
        throw BasisMismatch("dressed pair needs l >= 0");
    DressedPair p;
    p.upper_bare = {n, l + 1};
    p.lower_bare = {n_prime, l};
    p.g = coupling_constant(vs, cfg, n, n_prime);
    const double a = renormalized_energy(vs, cfg, p.upper_bare);
    const double b = renormalized_energy(vs, cfg, p.lower_bare);
    p.e_sigma = 0.5 * (a + b);
    p.e_delta = 0.5 * (a - b);
    const double coupling = p.g * std::sqrt(static_cast<double>(l + 1));
    const double half = std::hypot(p.e_delta, coupling);
    p.e_plus = p.e_sigma + half;
    p.e_minus = p.e_sigma - half;
    p.mixing_angle = std::atan2(coupling, -p.e_delta);
    return p;
}

double perturbative_shift(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n, int l,
                          ResonanceGuard guard) {
    check_index(vs, n);
    if (cfg.b_y == 0.0)
        return 0.0;
    const double hw = hbar_omega_c(cfg);
    double sum = 0.0;
    for (int np = 1; np <= vs.n_max(); ++np) {
        if (np == n)
            continue;
        const double e = vs.energy(n) - vs.energy(np);
        const double g = coupling_constant(vs, cfg, n, np);
        guard_denominator(e - hw, g, guard, n, np);
        if (l > 0)
            guard_denominator(e + hw, g, guard, n, np);
        const double z = vs.z_elem(n, np);
        sum += z * z * (1.0 + hw * l / (e + hw) + hw * (l + 1) / (e - hw));
    }
    return diamagnetic_scale(cfg) * sum;
}

double transition_shift(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int l, ResonanceGuard guard) {
    return to_ghz(perturbative_shift(vs, cfg, 2, l, guard) - perturbative_shift(vs, cfg, 1, l, guard));
}

double lamb_shift(const VerticalSpectrum& vs, const FieldConfiguration& cfg, ResonanceGuard guard) {
    const double hw = hbar_omega_c(cfg);
    auto branch = [&](int n) {
        double s = 0.0;
        for (int np = 1; np <= vs.n_max(); ++np) {
            if (np == n)
                continue;
            const double e = vs.energy(np) - vs.energy(n);
            guard_denominator(e + hw, coupling_constant(vs, cfg, n, np), guard, n, np);
            const double z = vs.z_elem(n, np);
            s += z * z * e / (e + hw);
        }
        return s;
    };
    return to_ghz(diamagnetic_scale(cfg) * (branch(2) - branch(1)));
}

double diagonalized_transition_shift(const VerticalSpectrum& vs, const FieldConfiguration& cfg,
                                     const ProductBasis& basis, int l) {
    const CoupledSpectrum cs = solve_coupled(vs, cfg, basis);
    const int k2 = cs.find({2, l});
    const int k1 = cs.find({1, l});
    return to_ghz(cs.energy(k2) - cs.energy(k1) - vs.transition(1, 2));
}

BetheCheck bethe_cancellation_check(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n, int l,
                                    ResonanceGuard guard) {
    BetheCheck out;
    out.reduced = perturbative_shift(vs, cfg, n, l, guard);
    const double scale = diamagnetic_scale(cfg);
    out.diamagnetic = scale * vs.z2_elem(n, n);

    // Second order over |n',l±1>, n' = n included: the ħ²ω_y²/2l_B² prefactor is
    // m ω_y² ħω_c / 2.
    const double hw = hbar_omega_c(cfg);
    double second = 0.0;
    for (int np = 1; np <= vs.n_max(); ++np) {
        const double e = vs.energy(n) - vs.energy(np);
        const double z = vs.z_elem(n, np);
        second += z * z * (l + 1) / (e - hw);
        if (l > 0)
            second += z * z * l / (e + hw);
    }
    out.raw = out.diamagnetic + scale * hw * second;
    out.residual = out.diamagnetic > 0.0 ? std::abs(out.raw - out.reduced) / out.diamagnetic : 0.0;
    return out;
}

std::vector<AdmixedAmplitude> admixed_state(const VerticalSpectrum& vs, const FieldConfiguration& cfg, int n,
                                            int l, ResonanceGuard guard) {
    check_index(vs, n);
    if (l < 0)
        throw BasisMismatch("admixed state needs l >= 0");
    const double hw = hbar_omega_c(cfg);
    std::vector<AdmixedAmplitude> out;
    for (int np = 1; np <= vs.n_max(); ++np) {
        const double e = vs.energy(n) - vs.energy(np);
        const double g = coupling_constant(vs, cfg, n, np);
        guard_denominator(e - hw, g, guard, n, np);
        out.push_back({{np, l + 1}, g * std::sqrt(static_cast<double>(l + 1)) / (e - hw)});
        if (l > 0) {
            guard_denominator(e + hw, g, guard, n, np);
            out.push_back({{np, l - 1}, g * std::sqrt(static_cast<double>(l)) / (e + hw)});
        }
    }
    return out;
}

Eigen::VectorXd admixed_vector(const VerticalSpectrum& vs, const FieldConfiguration& cfg,
                               const ProductBasis& basis, int n, int l, ResonanceGuard guard) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.size());
    v[basis.index({n, l})] = 1.0;
    for (const auto& a : admixed_state(vs, cfg, n, l, guard)) {
        if (basis.contains(a.state))
            v[basis.index(a.state)] += a.amplitude;
    }
    return v.normalized();
}

InterferenceMoments interference_moments(const VerticalSpectrum& vs, const FieldConfiguration& cfg) {
    if (vs.n_max() < 3)
        throw BasisMismatch("interference moments need n_max >= 3");
    const double lb = magnetic_length(cfg.b_z);
    const double a = vs.z_elem(2, 2) * vs.z_elem(2, 1) * cfg.b_y / (std::sqrt(2.0) * lb * cfg.b_z);
    const double s = vs.z_elem(2, 3) < 0.0 ? -1.0 : 1.0;
    const double z31 = vs.z_elem(3, 1);
    return {a + s * z31, a - s * z31};
}

double cancellation_field(double z22, double z31_over_z21, double b_z) {
    if (!(z22 > 0.0))
        throw ConfigError("cancellation_field needs z22 > 0");
    return std::sqrt(2.0) * magnetic_length(b_z) * b_z * std::abs(z31_over_z21) / z22;
}

std::vector<InterferencePoint> interference_scan(const VerticalSpectrum& vs, const FieldConfiguration& base,
                                                 const ProductBasis& basis, const std::vector<double>& b_y,
                                                 int threads) {
    if (basis.n_max() < 3 || basis.l_max() < 1)
        throw BasisMismatch("interference scan needs n_max >= 3 and l_max >= 1");
    const auto family = sweep_field(vs, base, basis, FieldAxis::BY, b_y, threads);
    const std::size_t count = family.size();
    std::vector<InterferencePoint> out(count);
    if (count == 0)
        return out;

    auto pair_by_weight = [&](const CoupledSpectrum& cs, int& upper, int& lower) {
        const int i21 = basis.index({2, 1});
        const int i30 = basis.index({3, 0});
        const Eigen::VectorXd w =
            cs.eigenvectors.row(i21).cwiseAbs2() + cs.eigenvectors.row(i30).cwiseAbs2();
        Eigen::Index first = 0;
        w.maxCoeff(&first);
        Eigen::VectorXd rest = w;
        rest[first] = -1.0;
        Eigen::Index second = 0;
        rest.maxCoeff(&second);
        upper = static_cast<int>(std::max(first, second));
        lower = static_cast<int>(std::min(first, second));
    };

    std::size_t seed = 0;
    while (seed < count && b_y[seed] == 0.0)
        ++seed;
    std::vector<int> upper(count), lower(count);
    for (std::size_t i = 0; i < std::min(seed, count); ++i)
        pair_by_weight(family[i], upper[i], lower[i]);
    if (seed < count) {
        int u = 0;
        int l = 0;
        pair_by_weight(family[seed], u, l);
        const std::vector<CoupledSpectrum> tail(family.begin() + static_cast<std::ptrdiff_t>(seed), family.end());
        const std::vector<int> tu = track_branch(tail, u);
        const std::vector<int> tl = track_branch(tail, l);
        for (std::size_t i = seed; i < count; ++i) {
            upper[i] = tu[i - seed];
            lower[i] = tl[i - seed];
        }
    }

    const double r2 = vs.units.length * vs.units.length;
    for (std::size_t i = 0; i < count; ++i) {
        const CoupledSpectrum& cs = family[i];
        FieldConfiguration cfg = base;
        cfg.b_y = b_y[i];
        InterferencePoint& p = out[i];
        p.b_y = b_y[i];
        p.analytic = interference_moments(vs, cfg);
        const double zu = cs.z_moment(vs.z_matrix, upper[i], 0);
        const double zl = cs.z_moment(vs.z_matrix, lower[i], 0);
        p.upper_moment_sq = zu * zu * r2;
        p.lower_moment_sq = zl * zl * r2;
        p.upper_energy_ghz = cs.energy_ghz(upper[i]);
        p.lower_energy_ghz = cs.energy_ghz(lower[i]);
    }
    return out;
}

double upper_branch_minimum(const std::vector<InterferencePoint>& scan) {
    if (scan.empty())
        throw ConfigError("empty interference scan");
    // B_y = 0 leaves the bare states unmixed and the moment trivially zero.
    std::size_t first = 0;
    while (first < scan.size() && scan[first].b_y == 0.0)
        ++first;
    if (first == scan.size())
        throw ConfigError("interference scan has no point with B_y != 0");
    std::size_t best = first;
    for (std::size_t i = first + 1; i < scan.size(); ++i) {
        if (scan[i].upper_moment_sq < scan[best].upper_moment_sq)
            best = i;
    }
    if (best == first || best + 1 == scan.size())
        return scan[best].b_y;
    const double x0 = scan[best - 1].b_y, x1 = scan[best].b_y, x2 = scan[best + 1].b_y;
    const double y0 = scan[best - 1].upper_moment_sq, y1 = scan[best].upper_moment_sq,
                 y2 = scan[best + 1].upper_moment_sq;
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0);
    if (!(curv > 0.0))
        return x1;
    const double xv = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
    return std::clamp(xv, x0, x2);
}

} // namespace heliumjcm

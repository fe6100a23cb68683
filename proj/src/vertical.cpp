#include "heliumjcm/vertical.hpp"

#include "heliumjcm/errors.hpp"
#include "tridiagonal.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace heliumjcm {

void GridSpec::validate() const {
    if (!(z_max > 0.0))
        throw ConfigError("grid: z_max must be positive");
    if (n_points < 100)
        throw ConfigError("grid: n_points must be >= 100");
    if (extrapolate_energies && n_points % 2 != 0)
        throw ConfigError("grid: n_points must be even when energies are extrapolated");
}

namespace {

struct Discretization {
    Eigen::VectorXd nodes;
    Eigen::VectorXd diag;
    Eigen::VectorXd offdiag;
};

Discretization discretize(double z_max, int intervals, double field) {
    const double h = z_max / intervals;
    const int m = intervals - 1;
    Discretization d;
    d.nodes.resize(m);
    d.diag.resize(m);
    d.offdiag = Eigen::VectorXd::Constant(m - 1, -1.0 / (h * h));
    for (int i = 0; i < m; ++i) {
        const double x = h * (i + 1);
        d.nodes[i] = x;
        d.diag[i] = 2.0 / (h * h) - 2.0 / x + field * x;
    }
    return d;
}

} // namespace

VerticalSpectrum solve_vertical(const MaterialProperties& mat, double e_perp, int n_max,
                                const GridSpec& grid) {
    if (n_max < 2)
        throw ConfigError("solve_vertical: n_max must be >= 2");
    if (!(e_perp >= 0.0))
        throw ConfigError("solve_vertical: e_perp must be >= 0");
    grid.validate();

    VerticalSpectrum vs;
    vs.material = mat;
    vs.e_perp = e_perp;
    vs.grid = grid;
    vs.units = ScaledUnits::of(mat);

    const double field = constants::elementary_charge * e_perp * vs.units.length / vs.units.energy;
    const double h = grid.spacing();
    const Discretization fine = discretize(grid.z_max, grid.n_points, field);
    auto pairs = detail::lowest_eigenpairs(fine.diag, fine.offdiag, n_max);

    vs.z = fine.nodes;
    vs.energies = pairs.values;
    if (grid.extrapolate_energies) {
        // The three-point Laplacian error is O(h²); one halving removes it.
        const Discretization coarse = discretize(grid.z_max, grid.n_points / 2, field);
        const auto coarse_pairs = detail::lowest_eigenpairs(coarse.diag, coarse.offdiag, n_max, false);
        vs.energies = (4.0 * pairs.values - coarse_pairs.values) / 3.0;
    }
    for (int k = 1; k < n_max; ++k) {
        if (!(vs.energies[k] > vs.energies[k - 1]))
            throw ConvergenceFailure("solve_vertical: energies not strictly increasing");
    }

    // Unit 2-norm -> trapezoidal L² norm (ψ vanishes at both ends), positive near the wall.
    vs.wavefunctions = pairs.vectors / std::sqrt(h);
    for (int k = 0; k < n_max; ++k) {
        if (vs.wavefunctions(0, k) < 0.0)
            vs.wavefunctions.col(k) *= -1.0;
    }

    const int m = static_cast<int>(vs.z.size());
    const int tail_start = static_cast<int>(0.95 * m);
    const double tail = h * vs.wavefunctions.col(n_max - 1).tail(m - tail_start).squaredNorm();
    if (tail > 1e-6) {
        throw GridTooSmall("solve_vertical: psi_" + std::to_string(n_max) + " tail " + std::to_string(tail) +
                           " exceeds 1e-6 of its norm; increase z_max");
    }

    const Eigen::MatrixXd& psi = vs.wavefunctions;
    vs.z_matrix = h * psi.transpose() * vs.z.asDiagonal() * psi;
    const Eigen::VectorXd z2 = vs.z.array().square();
    vs.z2_matrix = h * psi.transpose() * z2.asDiagonal() * psi;
    vs.z_matrix = 0.5 * (vs.z_matrix + vs.z_matrix.transpose()).eval();
    vs.z2_matrix = 0.5 * (vs.z2_matrix + vs.z2_matrix.transpose()).eval();

    // <2/x² + f>: trapezoid including the z = 0 end, where ψ²/x² → ψ'(0)² ≈ (ψ_1/h)².
    const Eigen::VectorXd force = (2.0 / z2.array() + field).matrix();
    vs.dvdz_diag.resize(n_max);
    vs.dvdz_wall.resize(n_max);
    for (int k = 0; k < n_max; ++k) {
        const double p1 = psi(0, k);
        const double p2 = psi(1, k);
        const double interior = h * psi.col(k).array().square().matrix().dot(force);
        vs.dvdz_diag[k] = interior + h * (p1 / h) * (p1 / h);
        const double slope = (4.0 * p1 - p2) / (2.0 * h);
        vs.dvdz_wall[k] = slope * slope;
    }
    return vs;
}

double VerticalSpectrum::energy(int n) const { return energies[n - 1] * units.energy; }

double VerticalSpectrum::transition(int n, int n_prime) const {
    return (energies[n_prime - 1] - energies[n - 1]) * units.energy;
}

double VerticalSpectrum::z_elem(int n, int n_prime) const { return z_matrix(n - 1, n_prime - 1) * units.length; }

double VerticalSpectrum::z2_elem(int n, int n_prime) const {
    return z2_matrix(n - 1, n_prime - 1) * units.length * units.length;
}

double VerticalSpectrum::dvdz(int n) const { return dvdz_diag[n - 1] * units.energy / units.length; }

double VerticalSpectrum::dvdz_from_wall(int n) const { return dvdz_wall[n - 1] * units.energy / units.length; }

double stark_slope(const MaterialProperties& mat, double e_perp, int n, int n_prime, const GridSpec& grid) {
    if (n == n_prime)
        return 0.0;
    const int n_max = std::max(n, n_prime);
    const double step = volts_per_cm(0.1);
    auto frequency = [&](double field) {
        const VerticalSpectrum vs = solve_vertical(mat, field, std::max(n_max, 2), grid);
        return to_ghz(vs.transition(n, n_prime));
    };
    const double step_v_per_cm = to_volts_per_cm(step);
    if (e_perp >= step) {
        return (frequency(e_perp + step) - frequency(e_perp - step)) / (2.0 * step_v_per_cm);
    }
    const double f0 = frequency(e_perp);
    const double f1 = frequency(e_perp + step);
    const double f2 = frequency(e_perp + 2.0 * step);
    return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * step_v_per_cm);
}

std::vector<double> truncation_report(const VerticalSpectrum& vs) {
    std::vector<double> residuals(static_cast<std::size_t>(vs.n_max()));
    for (int k = 0; k < vs.n_max(); ++k) {
        const double full = vs.z2_matrix(k, k);
        const double partial = vs.z_matrix.row(k).squaredNorm();
        residuals[static_cast<std::size_t>(k)] = std::abs(full - partial) / full;
    }
    return residuals;
}

void write_wavefunctions_csv(const VerticalSpectrum& vs, std::ostream& out) {
    out << "z_rB";
    for (int k = 1; k <= vs.n_max(); ++k)
        out << ",psi_" << k;
    out << '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < vs.z.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.8g", vs.z[i]);
        out << buf;
        for (int k = 0; k < vs.n_max(); ++k) {
            std::snprintf(buf, sizeof buf, ",%.10e", vs.wavefunctions(i, k));
            out << buf;
        }
        out << '\n';
    }
}

} // namespace heliumjcm

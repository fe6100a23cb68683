#include "heliumjcm/coupled.hpp"

#include "heliumjcm/errors.hpp"
#include "heliumjcm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace heliumjcm {

ProductBasis::ProductBasis(int n_max, int l_max) : n_max_(n_max), l_max_(l_max) {
    if (n_max < 1 || l_max < 0)
        throw ConfigError("product basis needs n_max >= 1 and l_max >= 0");
}

int ProductBasis::index(BasisState s) const {
    if (!contains(s))
        throw BasisMismatch("state |" + std::to_string(s.n) + "," + std::to_string(s.l) + "> outside basis");
    return (s.n - 1) * (l_max_ + 1) + s.l;
}

BasisState ProductBasis::state(int index) const {
    if (index < 0 || index >= size())
        throw BasisMismatch("basis index out of range");
    return {index / (l_max_ + 1) + 1, index % (l_max_ + 1)};
}

Eigen::MatrixXd assemble_hamiltonian(const VerticalSpectrum& vs, const FieldConfiguration& cfg,
                                     const ProductBasis& basis, DiamagneticMode mode) {
    if (basis.n_max() > vs.n_max()) {
        throw BasisMismatch("basis n_max " + std::to_string(basis.n_max()) + " exceeds vertical n_max " +
                            std::to_string(vs.n_max()));
    }
    if (std::abs(cfg.e_perp - vs.e_perp) > 1e-9 * std::max(1.0, std::abs(vs.e_perp)))
        throw BasisMismatch("field configuration E_perp differs from the vertical solution");
    cfg.validate();

    const double m = constants::electron_mass;
    const double hbar = constants::hbar;
    const double omega_c = cyclotron_frequency(cfg.b_z);
    const double omega_y = cyclotron_frequency(cfg.b_y);
    const double r_e = vs.units.energy;
    const double r_b = vs.units.length;

    const double landau = hbar * omega_c / r_e;
    const double diamag = 0.5 * m * omega_y * omega_y * r_b * r_b / r_e;
    // ħω_y/(√2 l_B) = √(ħ m ω_c ω_y² / 2) / ... stays finite as B_z → 0.
    const double coupling = std::sqrt(0.5 * hbar * m * omega_c) * omega_y * r_b / r_e;

    const int size = basis.size();
    const int lmax = basis.l_max();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
    for (int n = 1; n <= basis.n_max(); ++n) {
        for (int np = 1; np <= basis.n_max(); ++np) {
            const double z = vs.z_matrix(n - 1, np - 1);
            double z2 = vs.z2_matrix(n - 1, np - 1);
            if (mode == DiamagneticMode::DiagonalOnly && n != np)
                z2 = 0.0;
            for (int l = 0; l <= lmax; ++l) {
                const int i = basis.index({n, l});
                h(i, basis.index({np, l})) += diamag * z2;
                if (l < lmax) {
                    const double c = coupling * z * std::sqrt(static_cast<double>(l + 1));
                    h(i, basis.index({np, l + 1})) += c;
                    h(basis.index({np, l + 1}), i) += c;
                }
            }
        }
        for (int l = 0; l <= lmax; ++l) {
            const int i = basis.index({n, l});
            h(i, i) += vs.energies[n - 1] + landau * l;
        }
    }
    return h;
}

double CoupledSpectrum::weight(int k, BasisState s) const {
    const double c = eigenvectors(basis.index(s), k);
    return c * c;
}

DominantComponent CoupledSpectrum::dominant(int k) const {
    Eigen::Index best = 0;
    const double w = eigenvectors.col(k).cwiseAbs2().maxCoeff(&best);
    return {basis.state(static_cast<int>(best)), w};
}

int CoupledSpectrum::find(BasisState s) const {
    Eigen::Index best = 0;
    eigenvectors.row(basis.index(s)).cwiseAbs2().maxCoeff(&best);
    return static_cast<int>(best);
}

double CoupledSpectrum::z_moment(const Eigen::MatrixXd& z_matrix, int k, int k_prime) const {
    const int nb = basis.n_max();
    const int nl = basis.l_max() + 1;
    // Column-major view: coefficient (l, n-1) of state k.
    const Eigen::Map<const Eigen::MatrixXd> a(eigenvectors.col(k).data(), nl, nb);
    const Eigen::Map<const Eigen::MatrixXd> b(eigenvectors.col(k_prime).data(), nl, nb);
    const Eigen::MatrixXd zb = z_matrix.topLeftCorner(nb, nb);
    return (a * zb).cwiseProduct(b).sum();
}

CoupledSpectrum diagonalize(const Eigen::MatrixXd& hamiltonian, const ProductBasis& basis,
                            const FieldConfiguration& cfg, const ScaledUnits& units) {
    if (hamiltonian.rows() != basis.size() || hamiltonian.cols() != basis.size())
        throw BasisMismatch("Hamiltonian size does not match basis");
    if (!hamiltonian.allFinite())
        throw ConvergenceFailure("Hamiltonian contains non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("dense eigensolver did not converge");

    CoupledSpectrum out;
    out.basis = basis;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    out.config = cfg;
    out.units = units;
    return out;
}

CoupledSpectrum solve_coupled(const VerticalSpectrum& vs, const FieldConfiguration& cfg,
                              const ProductBasis& basis, DiamagneticMode mode) {
    return diagonalize(assemble_hamiltonian(vs, cfg, basis, mode), basis, cfg, vs.units);
}

std::vector<CoupledSpectrum> sweep_field(const VerticalSpectrum& vs, const FieldConfiguration& base,
                                         const ProductBasis& basis, FieldAxis axis,
                                         const std::vector<double>& values, int threads,
                                         DiamagneticMode mode) {
    std::vector<CoupledSpectrum> out(values.size());
    parallel_for(values.size(), threads, [&](std::size_t i) {
        FieldConfiguration cfg = base;
        (axis == FieldAxis::BZ ? cfg.b_z : cfg.b_y) = values[i];
        out[i] = solve_coupled(vs, cfg, basis, mode);
    });
    return out;
}

double find_crossing(const VerticalSpectrum& vs, BasisState a, BasisState b, double b_z_min,
                     double b_z_max, double tolerance) {
    if (a.n > vs.n_max() || b.n > vs.n_max())
        throw BasisMismatch("crossing states outside the vertical spectrum");
    auto diff = [&](double bz) {
        const double hw = constants::hbar * cyclotron_frequency(bz);
        return (vs.energy(a.n) + hw * a.l) - (vs.energy(b.n) + hw * b.l);
    };
    double lo = b_z_min;
    double hi = b_z_max;
    double flo = diff(lo);
    const double fhi = diff(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw NoCrossingInRange("no crossing of |" + std::to_string(a.n) + "," + std::to_string(a.l) + "> and |" +
                                std::to_string(b.n) + "," + std::to_string(b.l) + "> in [" +
                                std::to_string(b_z_min) + ", " + std::to_string(b_z_max) + "] T");
    }
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double fm = diff(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

int best_overlap(const CoupledSpectrum& next, const Eigen::VectorXd& previous, double& overlap) {
    const Eigen::VectorXd o = (next.eigenvectors.transpose() * previous).cwiseAbs2();
    Eigen::Index best = 0;
    overlap = o.maxCoeff(&best);
    return static_cast<int>(best);
}

std::vector<int> track_from(const std::vector<CoupledSpectrum>& family, const Eigen::VectorXd& seed,
                            double min_overlap) {
    std::vector<int> path(family.size());
    Eigen::VectorXd previous = seed;
    for (std::size_t i = 0; i < family.size(); ++i) {
        double overlap = 0.0;
        const int k = best_overlap(family[i], previous, overlap);
        if (overlap < min_overlap) {
            throw BranchTrackingLost("branch tracking lost at sweep index " + std::to_string(i) + " (overlap " +
                                     std::to_string(overlap) + ")");
        }
        path[i] = k;
        previous = family[i].eigenvectors.col(k);
    }
    return path;
}

struct PairPath {
    std::vector<int> a;
    std::vector<int> b;
};

// At every sweep point, the two eigenstates carrying the largest weight in
// span{a, b}. The dressed pair stays mostly inside that span across its own
// anticrossing, while a third level crossing narrowly through only borrows part
// of it, so this choice does not hop onto the intruder the way overlap
// continuity can when a sample lands mid-crossing.
PairPath select_pair(const std::vector<CoupledSpectrum>& family, BasisState a, BasisState b,
                     double min_weight = 0.25) {
    PairPath path{std::vector<int>(family.size()), std::vector<int>(family.size())};
    for (std::size_t i = 0; i < family.size(); ++i) {
        const CoupledSpectrum& cs = family[i];
        const int ia = cs.basis.index(a);
        const int ib = cs.basis.index(b);
        const Eigen::VectorXd wa = cs.eigenvectors.row(ia).transpose().cwiseAbs2();
        const Eigen::VectorXd wb = cs.eigenvectors.row(ib).transpose().cwiseAbs2();
        const Eigen::VectorXd w = wa + wb;
        Eigen::Index k1 = 0;
        w.maxCoeff(&k1);
        Eigen::VectorXd rest = w;
        rest[k1] = -1.0;
        Eigen::Index k2 = 0;
        rest.maxCoeff(&k2);
        if (w[k2] < min_weight) {
            throw BranchTrackingLost("pair weight " + std::to_string(w[k2]) + " below " +
                                     std::to_string(min_weight) + " at sweep index " + std::to_string(i));
        }
        if (wa[k1] + wb[k2] < wa[k2] + wb[k1])
            std::swap(k1, k2);
        path.a[i] = static_cast<int>(k1);
        path.b[i] = static_cast<int>(k2);
    }
    return path;
}

struct Refined {
    double x;
    double y;
};

// Vertex of the parabola through three equally weighted samples; falls back to
// the middle sample when the points are collinear or the vertex leaves the bracket.
Refined parabolic_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0);
    if (!(curv > 0.0))
        return {x1, y1};
    const double slope = d01 - curv * (x0 + x1);
    const double xv = -slope / (2.0 * curv);
    if (xv < x0 || xv > x2)
        return {x1, y1};
    return {xv, y0 + d01 * (xv - x0) + curv * (xv - x0) * (xv - x1)};
}

} // namespace

std::vector<int> track_branch(const std::vector<CoupledSpectrum>& family, int start, double min_overlap) {
    if (family.empty())
        return {};
    if (start < 0 || start >= family.front().size())
        throw BasisMismatch("branch start index out of range");
    return track_from(family, family.front().eigenvectors.col(start), min_overlap);
}

GapResult minimum_gap(const std::vector<double>& b_z, const std::vector<CoupledSpectrum>& family,
                      BasisState a, BasisState b) {
    if (b_z.size() != family.size() || family.size() < 3)
        throw ConfigError("minimum_gap needs at least three sweep points");
    const PairPath p = select_pair(family, a, b);

    std::vector<double> gap(family.size());
    for (std::size_t i = 0; i < family.size(); ++i)
        gap[i] = std::abs(family[i].eigenvalues[p.a[i]] - family[i].eigenvalues[p.b[i]]);
    const auto it = std::min_element(gap.begin(), gap.end());
    const std::size_t i = static_cast<std::size_t>(it - gap.begin());

    GapResult r;
    r.index = i;
    r.b_z = b_z[i];
    r.gap = gap[i];
    if (i > 0 && i + 1 < gap.size()) {
        const Refined v = parabolic_vertex(b_z[i - 1], gap[i - 1], b_z[i], gap[i], b_z[i + 1], gap[i + 1]);
        r.b_z = v.x;
        r.gap = v.y;
    }
    r.gap *= family.front().units.energy;
    r.gap_ghz = to_ghz(r.gap);
    return r;
}

GapResult minimum_gap_scan(const VerticalSpectrum& vs, const FieldConfiguration& base,
                           const ProductBasis& basis, BasisState a, BasisState b, double b_z_min,
                           double b_z_max, int steps, int threads) {
    if (steps < 5 || !(b_z_max > b_z_min))
        throw ConfigError("minimum_gap_scan needs steps >= 5 and b_z_max > b_z_min");
    auto grid = [](double lo, double hi, int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
        return v;
    };
    const std::vector<double> coarse = grid(b_z_min, b_z_max, steps);
    const auto family = sweep_field(vs, base, basis, FieldAxis::BZ, coarse, threads);
    const GapResult first = minimum_gap(coarse, family, a, b);

    const std::size_t i = first.index;
    const std::size_t lo = i > 0 ? i - 1 : 0;
    const std::size_t hi = std::min(i + 1, coarse.size() - 1);
    const std::vector<double> fine = grid(coarse[lo], coarse[hi], steps);
    const auto fine_family = sweep_field(vs, base, basis, FieldAxis::BZ, fine, threads);

    const PairPath f = select_pair(fine_family, a, b);

    std::vector<double> gap(fine.size());
    for (std::size_t j = 0; j < fine.size(); ++j)
        gap[j] = std::abs(fine_family[j].eigenvalues[f.a[j]] - fine_family[j].eigenvalues[f.b[j]]);
    const std::size_t j = static_cast<std::size_t>(std::min_element(gap.begin(), gap.end()) - gap.begin());

    GapResult r;
    r.index = i;
    r.b_z = fine[j];
    r.gap = gap[j];
    if (j > 0 && j + 1 < gap.size()) {
        const Refined v = parabolic_vertex(fine[j - 1], gap[j - 1], fine[j], gap[j], fine[j + 1], gap[j + 1]);
        r.b_z = v.x;
        r.gap = v.y;
    }
    r.gap *= vs.units.energy;
    r.gap_ghz = to_ghz(r.gap);
    return r;
}

double truncation_drift(const VerticalSpectrum& vs, const FieldConfiguration& cfg, const ProductBasis& basis,
                        int extra) {
    const CoupledSpectrum small = solve_coupled(vs, cfg, basis);
    const CoupledSpectrum large = solve_coupled(vs, cfg, ProductBasis(basis.n_max(), basis.l_max() + extra));
    const double ceiling = vs.energies[std::min(basis.n_max(), 4) - 1];
    double drift = 0.0;
    for (int k = 0; k < small.size() && small.eigenvalues[k] < ceiling; ++k)
        drift = std::max(drift, std::abs(small.eigenvalues[k] - large.eigenvalues[k]));
    return drift * vs.units.energy;
}

} // namespace heliumjcm

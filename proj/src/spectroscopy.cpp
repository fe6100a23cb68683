#include "heliumjcm/spectroscopy.hpp"

#include "heliumjcm/errors.hpp"
#include "heliumjcm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <typeinfo>

namespace heliumjcm {

std::vector<double> thermal_populations(const FieldConfiguration& cfg, int l_cut) {
    if (l_cut < 1)
        throw ConfigError("thermal_populations: l_cut must be >= 1");
    std::vector<double> w(static_cast<std::size_t>(l_cut), 0.0);
    if (!(cfg.temperature > 0.0)) {
        w[0] = 1.0;
        return w;
    }
    const double x = constants::hbar * cyclotron_frequency(cfg.b_z) / (constants::boltzmann * cfg.temperature);
    double total = 0.0;
    for (int l = 0; l < l_cut; ++l) {
        w[static_cast<std::size_t>(l)] = std::exp(-x * l);
        total += w[static_cast<std::size_t>(l)];
    }
    for (double& v : w)
        v /= total;
    return w;
}

std::vector<TransitionLine> transition_catalog(const CoupledSpectrum& cs, const VerticalSpectrum& vs,
                                               const std::vector<double>& populations, double f_min,
                                               double f_max, double min_moment_sq) {
    const double r2 = vs.units.length * vs.units.length;
    std::vector<TransitionLine> lines;
    const int l_cut = std::min(static_cast<int>(populations.size()), cs.basis.l_max() + 1);
    for (int l = 0; l < l_cut; ++l) {
        const int i = cs.find({1, l});
        for (int k = 0; k < cs.size(); ++k) {
            if (k == i)
                continue;
            const double f = to_ghz(cs.energy(k) - cs.energy(i));
            if (f < f_min || f > f_max)
                continue;
            const double z = cs.z_moment(vs.z_matrix, k, i);
            if (z * z < min_moment_sq)
                continue;
            const DominantComponent d = cs.dominant(k);
            TransitionLine line;
            line.initial = {1, l};
            line.thermal_weight = populations[static_cast<std::size_t>(l)];
            line.initial_index = i;
            line.final_index = k;
            line.final_dominant = d.state;
            line.final_weight = d.weight;
            line.frequency_ghz = f;
            line.moment_sq = z * z * r2;
            line.sideband_order = d.state.l - l;
            lines.push_back(line);
        }
    }
    return lines;
}

void BroadeningModel::validate() const {
    if (!(base_width >= 0.0))
        throw ConfigError("broadening.base_width must be >= 0");
    if (!(kappa > 0.0))
        throw ConfigError("broadening.kappa must be positive");
    if (!(density > 0.0))
        throw ConfigError("broadening.density must be positive");
    if (!(field_coefficient >= 0.0))
        throw ConfigError("broadening.c_f must be >= 0");
}

WidthBreakdown broadening_breakdown(const FieldConfiguration& cfg, const BroadeningModel& model) {
    WidthBreakdown w;
    w.base = model.base_width;
    const double by = std::abs(cfg.b_y);
    if (by > 0.0 && cfg.b_z > 0.0) {
        const double fluct = model.field_coefficient * std::pow(model.density, 0.75);  // V/cm
        w.many_electron = model.kappa * (by / cfg.b_z) * fluct;
    }
    w.low_field_regime = cfg.b_z < model.thermal_bz_threshold;
    if (w.low_field_regime && cfg.temperature > 0.0) {
        const double v = std::sqrt(constants::boltzmann * cfg.temperature / constants::electron_mass);
        w.thermal = model.kappa * to_volts_per_cm(v * by);
    }
    w.total = std::sqrt(w.base * w.base + w.many_electron * w.many_electron + w.thermal * w.thermal);
    return w;
}

double broadening_width(const FieldConfiguration& cfg, const BroadeningModel& model) {
    return broadening_breakdown(cfg, model).total;
}

std::vector<double> line_profile(const TransitionLine& line, double width_ghz, const std::vector<double>& e_axis) {
    std::vector<double> out(e_axis.size(), 0.0);
    if (e_axis.size() < 2)
        return out;
    const double step = e_axis[1] - e_axis[0];
    const double area = line.thermal_weight * line.moment_sq;
    const double slope = std::abs(line.stark_slope);
    const double sigma_f = width_ghz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double sigma = slope > 0.0 ? sigma_f / slope : 0.0;

    auto cdf = [&](double e) {
        const double x = e - line.e_perp;
        if (sigma <= 0.0)
            return x < 0.0 ? 0.0 : 1.0;
        return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
    };
    for (std::size_t i = 0; i < e_axis.size(); ++i) {
        const double lo = e_axis[i] - 0.5 * step;
        const double hi = e_axis[i] + 0.5 * step;
        out[i] = area * (cdf(hi) - cdf(lo)) / step;
    }
    return out;
}

std::vector<double> MapSpec::e_axis() const {
    std::vector<double> v(static_cast<std::size_t>(e_points));
    for (int i = 0; i < e_points; ++i)
        v[static_cast<std::size_t>(i)] = e_min + (e_max - e_min) * i / (e_points - 1);
    return v;
}

void MapSpec::validate() const {
    if (sweep.empty())
        throw ConfigError("map: sweep has no points");
    if (!(e_max > e_min) || e_min < 0.0)
        throw ConfigError("map: need 0 <= e_min < e_max");
    if (e_points < 2)
        throw ConfigError("map: e_points must be >= 2");
    if (!(mw_frequency > 0.0))
        throw ConfigError("map: mw_frequency must be positive");
    if (l_cut < 1 || l_cut > l_max + 1)
        throw ConfigError("map: l_cut must be in [1, l_max + 1]");
    if (n_max < 2 || l_max < 1)
        throw ConfigError("map: need n_max >= 2 and l_max >= 1");
    if (!(anchor_spacing > 0.0))
        throw ConfigError("map: anchor_spacing must be positive");
    broadening.validate();
    grid.validate();
}

namespace {

struct PointResult {
    std::vector<TransitionLine> lines;
    WidthBreakdown width;
    bool failed = false;
    PointFailure failure;
};

int best_match(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& v) {
    Eigen::Index k = 0;
    (vectors.transpose() * v).cwiseAbs().maxCoeff(&k);
    return static_cast<int>(k);
}

// d(E_k − E_i)/dE⊥ = e(<k|z|k> − <i|z|i>), GHz per V/cm.
double hellmann_feynman_slope(const CoupledSpectrum& cs, const VerticalSpectrum& vs, int k, int i) {
    const double dz = (cs.z_moment(vs.z_matrix, k, k) - cs.z_moment(vs.z_matrix, i, i)) * vs.units.length;
    return to_ghz(constants::elementary_charge * dz * volts_per_cm(1.0));
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const NearResonance*>(&e))
        return "NearResonance";
    if (dynamic_cast<const ConvergenceFailure*>(&e))
        return "ConvergenceFailure";
    if (dynamic_cast<const BranchTrackingLost*>(&e))
        return "BranchTrackingLost";
    if (dynamic_cast<const DegenerateField*>(&e))
        return "DegenerateField";
    if (dynamic_cast<const GridTooSmall*>(&e))
        return "GridTooSmall";
    if (dynamic_cast<const BasisMismatch*>(&e))
        return "BasisMismatch";
    return "Error";
}

} // namespace

AbsorptionMap absorption_map(const MapSpec& spec) {
    spec.validate();
    const std::vector<double> axis = spec.e_axis();

    std::vector<double> anchors;
    const double first = std::max(0.0, spec.e_min - spec.anchor_spacing);
    const int intervals = static_cast<int>(std::ceil((spec.e_max + spec.anchor_spacing - first) / spec.anchor_spacing));
    for (int i = 0; i <= intervals; ++i)
        anchors.push_back(first + i * spec.anchor_spacing);

    std::vector<VerticalSpectrum> verticals(anchors.size());
    parallel_for(anchors.size(), spec.threads, [&](std::size_t a) {
        verticals[a] = solve_vertical(spec.material, volts_per_cm(anchors[a]), spec.n_max, spec.grid);
    });

    const ProductBasis basis(spec.n_max, spec.l_max);
    const double f = spec.mw_frequency;
    const double r2 = verticals.front().units.length * verticals.front().units.length;

    std::vector<PointResult> results(spec.sweep.size());
    parallel_for(spec.sweep.size(), spec.threads, [&](std::size_t s) {
        PointResult& res = results[s];
        FieldConfiguration cfg = spec.base;
        (spec.axis == FieldAxis::BZ ? cfg.b_z : cfg.b_y) = spec.sweep[s];
        try {
            if (!(cfg.b_z > 0.0))
                throw DegenerateField("B_z must be positive for Landau-level spectroscopy");
            const std::vector<double> pops = thermal_populations(cfg, spec.l_cut);
            res.width = broadening_breakdown(cfg, spec.broadening);

            std::vector<CoupledSpectrum> spectra(anchors.size());
            for (std::size_t a = 0; a < anchors.size(); ++a) {
                FieldConfiguration ca = cfg;
                ca.e_perp = verticals[a].e_perp;
                spectra[a] = solve_coupled(verticals[a], ca, basis);
            }

            for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
                const CoupledSpectrum& A = spectra[a];
                const CoupledSpectrum& B = spectra[a + 1];
                const Eigen::MatrixXd overlap = (A.eigenvectors.transpose() * B.eigenvectors).cwiseAbs();
                std::vector<int> match(static_cast<std::size_t>(A.size()));
                for (int k = 0; k < A.size(); ++k) {
                    Eigen::Index j = 0;
                    overlap.row(k).maxCoeff(&j);
                    match[static_cast<std::size_t>(k)] = static_cast<int>(j);
                }
                for (int l = 0; l < spec.l_cut; ++l) {
                    const int ia = A.find({1, l});
                    const int ib = match[static_cast<std::size_t>(ia)];
                    for (int k = 0; k < A.size(); ++k) {
                        if (k == ia)
                            continue;
                        const int kb = match[static_cast<std::size_t>(k)];
                        if (kb == ib)
                            continue;
                        const double fa = to_ghz(A.energy(k) - A.energy(ia));
                        const double fb = to_ghz(B.energy(kb) - B.energy(ib));
                        if ((fa < f) == (fb < f))
                            continue;
                        const double za = A.z_moment(verticals[a].z_matrix, k, ia);
                        const double zb = B.z_moment(verticals[a + 1].z_matrix, kb, ib);
                        if (std::max(za * za, zb * zb) < spec.min_moment_sq)
                            continue;

                        // Interpolate, then one Newton step on a full solve at the guess.
                        const double t = (f - fa) / (fb - fa);
                        const double guess = anchors[a] + t * (anchors[a + 1] - anchors[a]);
                        const VerticalSpectrum vr =
                            solve_vertical(spec.material, volts_per_cm(guess), spec.n_max, spec.grid);
                        FieldConfiguration cr = cfg;
                        cr.e_perp = vr.e_perp;
                        const CoupledSpectrum R = solve_coupled(vr, cr, basis);
                        const int ir = best_match(R.eigenvectors, A.eigenvectors.col(ia));
                        const int kr = best_match(R.eigenvectors, A.eigenvectors.col(k));
                        if (ir == kr)
                            continue;
                        const double fr = to_ghz(R.energy(kr) - R.energy(ir));
                        const double slope = hellmann_feynman_slope(R, vr, kr, ir);
                        double centre = guess;
                        if (std::abs(slope) > 1e-9) {
                            const double step = (f - fr) / slope;
                            if (std::abs(step) <= spec.anchor_spacing)
                                centre = guess + step;
                        }
                        const double z = R.z_moment(vr.z_matrix, kr, ir);
                        if (z * z < spec.min_moment_sq)
                            continue;

                        const DominantComponent d = R.dominant(kr);
                        TransitionLine line;
                        line.initial = {1, l};
                        line.thermal_weight = pops[static_cast<std::size_t>(l)];
                        line.initial_index = ir;
                        line.final_index = kr;
                        line.final_dominant = d.state;
                        line.final_weight = d.weight;
                        line.frequency_ghz = f;
                        line.moment_sq = z * z * r2;
                        line.sideband_order = d.state.l - l;
                        line.e_perp = centre;
                        line.stark_slope = slope;
                        line.sweep_value = spec.sweep[s];
                        line.sweep_index = static_cast<int>(s);
                        res.lines.push_back(line);
                    }
                }
            }
        } catch (const Error& e) {
            res.failed = true;
            res.lines.clear();
            res.failure = {static_cast<int>(s), spec.sweep[s], error_kind(e), e.what()};
        }
    });

    AbsorptionMap map;
    map.axis = spec.axis;
    map.sweep = spec.sweep;
    map.e_perp = axis;
    map.config = spec.base;
    map.mw_frequency = spec.mw_frequency;
    map.raw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.sweep.size()), static_cast<Eigen::Index>(axis.size()));
    map.widths.resize(spec.sweep.size());
    for (std::size_t s = 0; s < results.size(); ++s) {
        PointResult& res = results[s];
        map.widths[s] = res.width;
        if (res.failed) {
            map.failures.push_back(res.failure);
            continue;
        }
        std::sort(res.lines.begin(), res.lines.end(), [](const TransitionLine& x, const TransitionLine& y) {
            return x.e_perp < y.e_perp;
        });
        for (const TransitionLine& line : res.lines) {
            const std::vector<double> p = line_profile(line, res.width.total, axis);
            for (std::size_t i = 0; i < axis.size(); ++i)
                map.raw(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) += p[i];
            map.lines.push_back(line);
        }
    }
    map.normalization = map.raw.size() > 0 ? map.raw.maxCoeff() : 0.0;
    map.intensity = map.normalization > 0.0 ? (map.raw / map.normalization).eval() : map.raw;
    return map;
}

void write_map_csv(const AbsorptionMap& map, std::ostream& out) {
    out << (map.axis == FieldAxis::BY ? "b_y" : "b_z") << ",e_perp,intensity\n";
    char buf[96];
    for (std::size_t s = 0; s < map.sweep.size(); ++s) {
        for (std::size_t i = 0; i < map.e_perp.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.8e\n", map.sweep[s], map.e_perp[i],
                          map.intensity(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)));
            out << buf;
        }
    }
}

void write_lines_csv(const AbsorptionMap& map, std::ostream& out) {
    out << (map.axis == FieldAxis::BY ? "b_y" : "b_z")
        << ",e_perp,stark_slope,initial_l,thermal_weight,final_n,final_l,final_weight,moment_sq_m2,sideband_order\n";
    char buf[256];
    for (const TransitionLine& l : map.lines) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%d,%.6e,%d,%d,%.6f,%.6e,%d\n", l.sweep_value, l.e_perp,
                      l.stark_slope, l.initial.l, l.thermal_weight, l.final_dominant.n, l.final_dominant.l,
                      l.final_weight, l.moment_sq, l.sideband_order);
        out << buf;
    }
}

double map_centroid(const AbsorptionMap& map, int sweep_index, double lo, double hi) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < map.e_perp.size(); ++i) {
        const double e = map.e_perp[i];
        if (e < lo || e > hi)
            continue;
        const double w = map.raw(sweep_index, static_cast<Eigen::Index>(i));
        num += w * e;
        den += w;
    }
    return den > 0.0 ? num / den : 0.0;
}

} // namespace heliumjcm

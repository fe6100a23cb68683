#include "doctest.h"

#include "common.hpp"
#include "heliumjcm/coupled.hpp"
#include "heliumjcm/errors.hpp"
#include "heliumjcm/spectroscopy.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

using namespace heliumjcm;

namespace {

const TransitionLine* find_line(const std::vector<TransitionLine>& lines, int initial_l, BasisState final) {
    for (const auto& line : lines) {
        if (line.initial.l == initial_l && line.final_dominant == final)
            return &line;
    }
    return nullptr;
}

MapSpec small_map() {
    MapSpec spec;
    spec.material = testing::he3();
    spec.base = FieldConfiguration::lab(0.0, 0.584, 0.0, 0.33);
    spec.axis = FieldAxis::BY;
    spec.n_max = 4;
    spec.l_max = 30;
    spec.e_min = 10.0;
    spec.e_max = 50.0;
    spec.e_points = 801;
    spec.threads = 4;
    return spec;
}

} // namespace

TEST_CASE("thermal populations") {
    const auto p = thermal_populations(FieldConfiguration::lab(23.0, 0.584, 0.0, 0.33), 40);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
    CHECK(p[0] == doctest::Approx(0.91).epsilon(0.011));
    for (std::size_t l = 1; l < p.size(); ++l)
        CHECK(p[l] < p[l - 1]);
    CHECK_THROWS_AS(thermal_populations(FieldConfiguration::lab(23.0, 0.584, 0.0), 0), ConfigError);
}

// The spacing differs from ħω_c only through the l dependence of the light
// shifts, which is second order in B_y.
TEST_CASE("sideband lines sit one cyclotron quantum from the main line") {
    const auto& vs = testing::vertical_at(25.0);
    auto offset = [&](double bz, double by) {
        const auto cfg = FieldConfiguration::lab(25.0, bz, by, 0.33);
        const auto cs = solve_coupled(vs, cfg, ProductBasis(6, 50));
        const auto lines = transition_catalog(cs, vs, thermal_populations(cfg, 4), 0.0, 400.0);
        const auto* main = find_line(lines, 0, {2, 0});
        const auto* side = find_line(lines, 0, {2, 1});
        REQUIRE(main != nullptr);
        REQUIRE(side != nullptr);
        CHECK(side->sideband_order == 1);
        const double fc = to_ghz(constants::hbar * cyclotron_frequency(bz));
        return (side->frequency_ghz - main->frequency_ghz) / fc - 1.0;
    };
    for (double bz : {0.4, 0.6, 0.8}) {
        const double coarse = offset(bz, 0.1);
        const double fine = offset(bz, 0.02);
        CHECK(std::abs(fine) < 5e-4);
        CHECK(coarse / fine == doctest::Approx(25.0).epsilon(0.05));
    }
}

TEST_CASE("sideband strength scales with the square of the tilt") {
    const auto& vs = testing::vertical_at(25.0);
    auto moment = [&](double by) {
        const auto cfg = FieldConfiguration::lab(25.0, 0.584, by, 0.33);
        const auto cs = solve_coupled(vs, cfg, ProductBasis(6, 50));
        const auto lines = transition_catalog(cs, vs, thermal_populations(cfg, 4), 0.0, 400.0);
        const auto* side = find_line(lines, 0, {2, 1});
        REQUIRE(side != nullptr);
        return side->moment_sq;
    };
    CHECK(moment(0.1) / moment(0.05) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("line profile conserves area and collapses at zero width") {
    TransitionLine line;
    line.thermal_weight = 0.8;
    line.moment_sq = 2.0;
    line.e_perp = 27.3;
    line.stark_slope = 0.7;
    std::vector<double> axis;
    for (int i = 0; i <= 400; ++i)
        axis.push_back(20.0 + 0.0375 * i);
    const double step = axis[1] - axis[0];
    for (double width : {0.0, 0.2, 1.0}) {
        const auto p = line_profile(line, width, axis);
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) * step == doctest::Approx(1.6).epsilon(1e-9));
    }
    const auto sharp = line_profile(line, 0.0, axis);
    CHECK(std::count_if(sharp.begin(), sharp.end(), [](double v) { return v > 0.0; }) == 1);
}

TEST_CASE("centroid of a synthesized line recovers its position") {
    TransitionLine line;
    line.thermal_weight = 1.0;
    line.moment_sq = 1.0;
    line.e_perp = 27.31;
    line.stark_slope = 0.7;
    const double width = 0.5;
    AbsorptionMap map;
    for (int i = 0; i <= 400; ++i)
        map.e_perp.push_back(20.0 + 0.0375 * i);
    const auto p = line_profile(line, width, map.e_perp);
    map.raw = Eigen::MatrixXd(1, static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        map.raw(0, static_cast<Eigen::Index>(i)) = p[i];
    const double fwhm_e = width / line.stark_slope;
    CHECK(std::abs(map_centroid(map, 0, 24.0, 31.0) - line.e_perp) < 0.02 * fwhm_e);
}

TEST_CASE("broadening model") {
    BroadeningModel model;
    const auto flat = broadening_breakdown(FieldConfiguration::lab(20.0, 0.584, 0.0), model);
    CHECK(flat.total == doctest::Approx(model.base_width));
    const double w3 = broadening_width(FieldConfiguration::lab(20.0, 0.584, 0.3), model);
    const double w6 = broadening_width(FieldConfiguration::lab(20.0, 0.584, 0.6), model);
    CHECK(w3 > model.base_width);
    CHECK(w6 > w3);
    CHECK(broadening_width(FieldConfiguration::lab(20.0, 0.584, -0.3), model) == doctest::Approx(w3));
    const auto low = broadening_breakdown(FieldConfiguration::lab(20.0, 0.1, 0.1), model);
    CHECK(low.low_field_regime);
    CHECK(low.thermal > 0.0);
    model.kappa = -1.0;
    CHECK_THROWS_AS(model.validate(), ConfigError);
}

TEST_CASE("absorption map: sum rule, tilt symmetry and normalization") {
    MapSpec spec = small_map();
    spec.sweep = {0.2, -0.2};
    const auto map = absorption_map(spec);
    REQUIRE(map.failures.empty());
    CHECK(map.intensity.maxCoeff() == doctest::Approx(1.0));
    CHECK(map.intensity.minCoeff() >= 0.0);
    CHECK(map.intensity.rows() == 2);
    CHECK(map.intensity.cols() == spec.e_points);

    const double step = map.e_perp[1] - map.e_perp[0];
    double expected = 0.0;
    for (const auto& line : map.lines) {
        if (line.sweep_index == 0 && line.e_perp > spec.e_min + 1.0 && line.e_perp < spec.e_max - 1.0)
            expected += line.thermal_weight * line.moment_sq;
    }
    const double integral = map.raw.row(0).sum() * step;
    REQUIRE(expected > 0.0);
    CHECK(integral == doctest::Approx(expected).epsilon(0.01));

    const double scale = map.raw.maxCoeff();
    CHECK((map.raw.row(0) - map.raw.row(1)).cwiseAbs().maxCoeff() < 1e-9 * scale);
}

TEST_CASE("map CSV is long-form and stable") {
    MapSpec spec = small_map();
    spec.sweep = {0.1};
    spec.e_points = 11;
    spec.e_min = 25.0;
    spec.e_max = 30.0;
    const auto a = absorption_map(spec);
    spec.threads = 1;
    const auto b = absorption_map(spec);
    std::ostringstream sa, sb;
    write_map_csv(a, sa);
    write_map_csv(b, sb);
    CHECK(sa.str() == sb.str());
    const std::string text = sa.str();
    CHECK(text.rfind("b_y,e_perp,intensity\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 12);
}

TEST_CASE("map settings are checked") {
    MapSpec spec = small_map();
    spec.sweep = {0.1};
    spec.e_max = spec.e_min;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

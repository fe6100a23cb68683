#include "doctest.h"

#include "common.hpp"
#include "heliumjcm/coupled.hpp"
#include "heliumjcm/errors.hpp"
#include "heliumjcm/jcm.hpp"

#include <Eigen/Dense>
#include <cmath>

using namespace heliumjcm;

TEST_CASE("dressed pair equals the explicit two-level matrix") {
    const auto& vs = testing::vertical_at(20.0);
    for (int l = 0; l <= 3; ++l) {
        const auto cfg = FieldConfiguration::lab(20.0, 1.1, 0.15);
        const auto p = dressed_pair(vs, cfg, 2, 3, l);
        const double g = coupling_constant(vs, cfg, 2, 3) * std::sqrt(l + 1.0);
        Eigen::Matrix2d m;
        m << renormalized_energy(vs, cfg, {3, l}), g, g, renormalized_energy(vs, cfg, {2, l + 1});
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues();
        const double scale = std::abs(ev[1]);
        CHECK(std::abs(p.e_minus - ev[0]) < 1e-12 * scale);
        CHECK(std::abs(p.e_plus - ev[1]) < 1e-12 * scale);
        CHECK(p.e_plus + p.e_minus == doctest::Approx(2.0 * p.e_sigma));
        CHECK(p.splitting() ==
              doctest::Approx(2.0 * std::sqrt(p.e_delta * p.e_delta + (l + 1.0) * p.g * p.g)));
    }
}

TEST_CASE("coupling is linear in the tilt field") {
    const auto& vs = testing::vertical_at(20.0);
    const double a = coupling_constant(vs, FieldConfiguration::lab(20.0, 1.0, 0.1), 2, 3);
    const double b = coupling_constant(vs, FieldConfiguration::lab(20.0, 1.0, 0.2), 2, 3);
    CHECK(b == doctest::Approx(2.0 * a));
    CHECK_THROWS_AS(coupling_constant(vs, FieldConfiguration::lab(20.0, 0.0, 0.1), 2, 3), DegenerateField);
}

// Second-order perturbation theory against the diagonalized level, both on the
// same truncated basis; the residual is fourth order in B_y.
TEST_CASE("perturbative shift error falls about fourfold when the tilt halves") {
    const auto& vs = testing::vertical_at(15.0);
    const ProductBasis basis(6, 50);
    for (BasisState s : {BasisState{1, 0}, BasisState{2, 0}}) {
        auto deviation = [&](double by) {
            const auto cfg = FieldConfiguration::lab(15.0, 0.65, by);
            const auto cs = solve_coupled(vs, cfg, basis);
            const double hw = constants::hbar * cyclotron_frequency(0.65);
            const double exact = cs.energy(cs.find(s)) - vs.energy(s.n) - hw * s.l;
            const double pert = bethe_cancellation_check(vs, cfg, s.n, s.l).raw;
            return std::abs(pert - exact) / std::abs(exact);
        };
        const double ratio = deviation(0.2) / deviation(0.1);
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.0);
    }
}

TEST_CASE("Lamb and light shift signs") {
    const auto& vs = testing::vertical_at(15.0);
    const auto cfg = FieldConfiguration::lab(15.0, 0.65, 0.2);
    CHECK(lamb_shift(vs, cfg) > 0.0);
    CHECK(transition_shift(vs, cfg, 0) > 0.0);
    CHECK(transition_shift(vs, cfg, 1) < 0.0);
}

TEST_CASE("resonance guard") {
    const auto& vs = testing::vertical_at(20.0);
    const double bz = find_crossing(vs, {2, 1}, {3, 0}, 0.2, 4.0, 1e-8);
    const auto cfg = FieldConfiguration::lab(20.0, bz, 0.1);
    CHECK_THROWS_AS(perturbative_shift(vs, cfg, 3, 0), NearResonance);
    CHECK_NOTHROW(perturbative_shift(vs, FieldConfiguration::lab(20.0, 0.5 * bz, 0.1), 3, 0));
}

TEST_CASE("Bethe-form shift agrees with the raw second-order sum") {
    const auto& vs = testing::vertical_at(15.0);
    const auto cfg = FieldConfiguration::lab(15.0, 0.65, 0.2);
    const auto check = bethe_cancellation_check(vs, cfg, 1, 0);
    CHECK(check.diamagnetic > 0.0);
    CHECK(check.residual < 0.05);
}

TEST_CASE("admixed state overlaps the diagonalized eigenvector") {
    const auto& vs = testing::vertical_at(15.0);
    const ProductBasis basis(6, 50);
    const auto cfg = FieldConfiguration::lab(15.0, 0.65, 0.05);
    const auto cs = solve_coupled(vs, cfg, basis);
    for (auto s : {BasisState{1, 0}, BasisState{2, 0}}) {
        const Eigen::VectorXd v = admixed_vector(vs, cfg, basis, s.n, s.l);
        const double overlap = v.dot(cs.eigenvectors.col(cs.find(s)));
        CHECK(overlap * overlap > 0.999);
    }
}

TEST_CASE("admixture amplitudes follow the closed form") {
    const auto& vs = testing::vertical_at(15.0);
    const auto cfg = FieldConfiguration::lab(15.0, 0.65, 0.05);
    const double hw = constants::hbar * cyclotron_frequency(0.65);
    const auto terms = admixed_state(vs, cfg, 2, 1);
    bool found_up = false;
    bool found_down = false;
    for (const auto& t : terms) {
        if (t.state == BasisState{1, 2}) {
            const double expected = coupling_constant(vs, cfg, 2, 1) * std::sqrt(2.0) / (vs.energy(2) - vs.energy(1) - hw);
            CHECK(t.amplitude == doctest::Approx(expected));
            found_up = true;
        }
        if (t.state == BasisState{1, 0}) {
            const double expected = coupling_constant(vs, cfg, 2, 1) / (vs.energy(2) - vs.energy(1) + hw);
            CHECK(t.amplitude == doctest::Approx(expected));
            found_down = true;
        }
    }
    CHECK(found_up);
    CHECK(found_down);
}

TEST_CASE("leading-order cancellation field") {
    const double z22 = 3.91 * testing::he3().bohr_radius;
    CHECK(cancellation_field(z22, 0.5, 1.18) == doctest::Approx(0.49).epsilon(0.04));
}

TEST_CASE("interference scan skips the untilted point") {
    const auto& vs = testing::vertical_at(20.0);
    const double bz = find_crossing(vs, {2, 1}, {3, 0}, 0.2, 4.0, 1e-7);
    std::vector<double> by;
    for (int i = 0; i <= 40; ++i)
        by.push_back(0.025 * i);
    const auto scan = interference_scan(vs, FieldConfiguration::lab(20.0, bz, 0.0), ProductBasis(6, 40), by, 4);
    CHECK(scan.front().upper_moment_sq == doctest::Approx(0.0));
    const double b_min = upper_branch_minimum(scan);
    CHECK(b_min > 0.2);
    CHECK(b_min < 0.9);
    for (const auto& p : scan)
        CHECK(p.upper_energy_ghz >= p.lower_energy_ghz);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capcav/constants.hpp"
#include "capcav/emitter_coupling.hpp"
#include "capcav/errors.hpp"

using namespace capcav;

namespace {

EmitterPlacement at(double dz, PolarizationAxis axis,
                    double theta = 0.0) {
    EmitterPlacement p;
    p.delta_z_nm = dz;
    p.pol_axis = axis;
    p.theta_rad = theta;
    return p;
}

} // namespace

TEST_CASE("anti-node and node efficiencies match the model endpoints") {
    const auto model = CouplingSurrogate::paper_centered();
    CHECK(eta_of_position(at(0.0, PolarizationAxis::Y), model) ==
          doctest::Approx(0.87));
    CHECK(eta_of_position(at(122.0, PolarizationAxis::Y), model) ==
          doctest::Approx(0.01).epsilon(0.02 / 0.01));
    CHECK(eta_of_position(at(0.0, PolarizationAxis::X), model) ==
          doctest::Approx(0.71));
    // Midpoint: exactly the mean of the anti-node and node values.
    CHECK(eta_of_position(at(61.0, PolarizationAxis::Y), model) ==
          doctest::Approx(0.5 * (0.87 + 0.01)).epsilon(1e-12));
}

TEST_CASE("z polarization is position independent") {
    const auto model = CouplingSurrogate::paper_centered();
    const double base = eta_of_position(at(0.0, PolarizationAxis::Z), model);
    CHECK(base == doctest::Approx(0.02));
    for (double z : {10.0, 61.0, 122.0, 200.0, 480.0}) {
        CHECK(eta_of_position(at(z, PolarizationAxis::Z), model) == base);
    }
}

TEST_CASE("orientation mixing follows cos^2/sin^2") {
    CHECK(eta_of_orientation(0.0, 0.87, 0.71) == doctest::Approx(0.87));
    CHECK(eta_of_orientation(kPi / 2.0, 0.87, 0.71) == doctest::Approx(0.71));
    CHECK(eta_of_orientation(kPi / 4.0, 0.87, 0.71) ==
          doctest::Approx(0.79).epsilon(1e-12));
    CHECK_THROWS_AS(eta_of_orientation(-0.1, 0.87, 0.71), DomainError);
    CHECK_THROWS_AS(eta_of_orientation(2.0, 0.87, 0.71), DomainError);
}

TEST_CASE("complementarity identity is exact") {
    for (double theta = 0.0; theta <= kPi / 4.0 + 1e-12; theta += kPi / 64.0) {
        const double a = eta_of_orientation(theta, 0.87, 0.71);
        const double b = eta_of_orientation(kPi / 2.0 - theta, 0.87, 0.71);
        CHECK(std::abs(a + b - (0.87 + 0.71)) < 1e-12);
    }
}

TEST_CASE("eta stays within [0, 1] everywhere") {
    const auto model = CouplingSurrogate::paper_centered();
    for (double z = -1000.0; z <= 1000.0; z += 7.3) {
        for (auto axis : {PolarizationAxis::X, PolarizationAxis::Y,
                          PolarizationAxis::Z}) {
            const double eta = eta_of_position(at(z, axis), model);
            CHECK(eta >= 0.0);
            CHECK(eta <= 1.0);
        }
    }
}

TEST_CASE("position sweep finds the two anti-nodes") {
    const auto model = CouplingSurrogate::paper_centered();
    const auto sweep =
        position_sweep(model, 0.0, 488.0, 1.0, PolarizationAxis::Y);
    CHECK(sweep.points.size() == 488);
    REQUIRE(sweep.maxima_nm.size() == 2);
    CHECK(std::abs(sweep.maxima_nm[0] - 0.0) <= 1.0);
    CHECK(std::abs(sweep.maxima_nm[1] - 244.0) <= 1.0);
    // Maxima spacing equals the standing period.
    CHECK(sweep.maxima_nm[1] - sweep.maxima_nm[0] ==
          doctest::Approx(model.standing_period_nm).epsilon(1.0 / 244.0));
}

TEST_CASE("argmax sits on the anti-node grid for both polarizations") {
    const auto model = CouplingSurrogate::paper_centered();
    for (auto axis : {PolarizationAxis::X, PolarizationAxis::Y}) {
        const auto sweep = position_sweep(model, 0.0, 976.0, 0.5, axis);
        double best_z = 0.0, best = -1.0;
        for (const auto& p : sweep.points) {
            if (p.eta > best) {
                best = p.eta;
                best_z = p.delta_z_nm;
            }
        }
        const double mod = std::fmod(best_z, model.standing_period_nm);
        CHECK((mod < 1.0 || model.standing_period_nm - mod < 1.0));
    }
}

TEST_CASE("z-pol sweep is constant with no extrema") {
    const auto model = CouplingSurrogate::paper_centered();
    const auto sweep =
        position_sweep(model, 0.0, 488.0, 1.0, PolarizationAxis::Z);
    CHECK(sweep.maxima_nm.empty());
    CHECK(sweep.minima_nm.empty());
    for (const auto& p : sweep.points) {
        CHECK(p.eta == doctest::Approx(0.02));
    }
}

TEST_CASE("off-center parameter set keeps the invariants") {
    const auto model = CouplingSurrogate::paper_off_center();
    CHECK(model.eta_z_floor == doctest::Approx(0.04));
    CHECK(eta_of_position(at(0.0, PolarizationAxis::Y), model) ==
          doctest::Approx(0.85));
    CHECK(eta_of_position(at(122.0, PolarizationAxis::X), model) ==
          doctest::Approx(0.07));
}

TEST_CASE("in-plane orientation interpolates between the axes") {
    const auto model = CouplingSurrogate::paper_centered();
    const double eta =
        eta_of_position(at(0.0, PolarizationAxis::InPlane, kPi / 4.0), model);
    CHECK(eta == doctest::Approx(0.79).epsilon(1e-12));
}

TEST_CASE("invalid inputs are rejected") {
    const auto model = CouplingSurrogate::paper_centered();
    EmitterPlacement p;
    p.radial_offset_nm = -1.0;
    CHECK_THROWS_AS(eta_of_position(p, model), DomainError);
    CHECK_THROWS_AS(position_sweep(model, 0.0, 100.0, 0.0, PolarizationAxis::Y),
                    DomainError);
    CouplingSurrogate bad = model;
    bad.eta_anti_y = 1.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = model;
    bad.eta_node_y = 0.9; // above anti-node
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

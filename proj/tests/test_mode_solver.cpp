#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "capcav/constants.hpp"
#include "capcav/errors.hpp"
#include "capcav/mode_solver.hpp"
#include "oracles.hpp"

using namespace capcav;

namespace {

LayeredFiberGeometry paper_geometry() {
    return LayeredFiberGeometry{};
}

LayeredFiberGeometry silica_rod(double d_in_nm, double d_out_nm) {
    LayeredFiberGeometry g;
    g.d_in_nm = d_in_nm;
    g.d_out_nm = d_out_nm;
    return g;
}

double relative_gap(std::complex<double> a, std::complex<double> b,
                    double scale) {
    return std::abs(a - b) / scale;
}

} // namespace

TEST_CASE("two-layer limit matches the textbook eigenvalue oracle") {
    for (double d_out : {400.0, 515.0, 600.0}) {
        const double oracle =
            oracle::two_layer_fundamental(1.457, 1.0, d_out / 2.0, 620.0);
        const GuidedMode at_zero = solve_fundamental_mode(silica_rod(0.0, d_out), 620.0);
        CHECK(std::abs(at_zero.n_eff - oracle) < 1e-6);
        const GuidedMode at_1nm = solve_fundamental_mode(silica_rod(1.0, d_out), 620.0);
        CHECK(std::abs(at_1nm.n_eff - oracle) < 1e-5);
    }
}

TEST_CASE("dispersion determinant changes sign at the two-layer oracle root") {
    const double oracle = oracle::two_layer_fundamental(1.457, 1.0, 257.5, 620.0);
    const auto geom = silica_rod(0.0, 515.0);
    const double below = dispersion_determinant(geom, 620.0, oracle - 1e-5, 1);
    const double above = dispersion_determinant(geom, 620.0, oracle + 1e-5, 1);
    CHECK(((below < 0.0) != (above < 0.0)));
}

TEST_CASE("paper geometry has exactly one fundamental root in (1, n_shell)") {
    // Bracket count by fine scan with the oracle-validated determinant. The
    // determinant switches branch at the water index, so each sub-interval is
    // scanned on its own.
    const auto geom = paper_geometry();
    int crossings = 0;
    const double segments[2][2] = {{1.0 + 1e-6, 1.333 - 1e-6},
                                   {1.333 + 1e-6, 1.4569}};
    for (const auto& seg : segments) {
        double prev = dispersion_determinant(geom, 620.0, seg[1], 1);
        for (double x = seg[1] - 1e-4; x > seg[0]; x -= 1e-4) {
            const double f = dispersion_determinant(geom, 620.0, x, 1);
            if ((f < 0.0) != (prev < 0.0)) ++crossings;
            prev = f;
        }
    }
    CHECK(crossings == 1);
}

TEST_CASE("paper geometry n_eff is Bragg-consistent") {
    const GuidedMode mode = solve_fundamental_mode(paper_geometry(), 620.0);
    CHECK(mode.n_eff > 1.15);
    CHECK(mode.n_eff < 1.40);
    CHECK(mode.beta_rad_per_m ==
          doctest::Approx(2.0 * kPi * mode.n_eff / 620e-9).epsilon(1e-12));
}

TEST_CASE("homogeneous geometry guides nothing") {
    LayeredFiberGeometry g;
    g.core = OpticalMaterial::fixed("m", 1.4);
    g.shell = OpticalMaterial::fixed("m", 1.4);
    g.cladding = OpticalMaterial::fixed("m", 1.4);
    CHECK_THROWS_AS(solve_fundamental_mode(g, 620.0), NoGuidedMode);
    // No valid trial interval exists either.
    CHECK_THROWS_AS(dispersion_determinant(g, 620.0, 1.4, 1), DomainError);
}

TEST_CASE("vanishing waveguide is below cutoff") {
    CHECK_THROWS_AS(solve_fundamental_mode(silica_rod(2.0, 10.0), 620.0),
                    NoGuidedMode);
}

TEST_CASE("degenerate and invalid geometry") {
    LayeredFiberGeometry g;
    g.d_in_nm = 515.0;
    g.d_out_nm = 515.0;
    CHECK_THROWS_AS(dispersion_determinant(g, 620.0, 1.2, 1), DomainError);
    CHECK_THROWS_AS(dispersion_determinant(paper_geometry(), 620.0, 1.457, 1),
                    DomainError);
    CHECK_THROWS_AS(dispersion_determinant(paper_geometry(), 620.0, 0.9, 1),
                    DomainError);
}

TEST_CASE("tangential fields are continuous across both interfaces") {
    const auto geom = paper_geometry();
    const GuidedMode mode = solve_fundamental_mode(geom, 620.0);
    // Field scale for the relative measure: tangential magnitude at the
    // interface.
    for (double r : {62.5, 257.5}) {
        const double eps = 1e-9;
        const auto in = mode_field(mode, geom, r - eps, 0.4);
        const auto out = mode_field(mode, geom, r + eps, 0.4);
        const double scale = std::max({std::abs(in.e_z), std::abs(in.e_phi),
                                       std::abs(in.h_z), std::abs(in.h_phi)});
        CHECK(relative_gap(in.e_z, out.e_z, scale) < 1e-6);
        CHECK(relative_gap(in.e_phi, out.e_phi, scale) < 1e-6);
        CHECK(relative_gap(in.h_z, out.h_z, scale) < 1e-6);
        CHECK(relative_gap(in.h_phi, out.h_phi, scale) < 1e-6);
    }
}

TEST_CASE("fields decay to zero far from the fiber") {
    const auto geom = paper_geometry();
    const GuidedMode mode = solve_fundamental_mode(geom, 620.0);
    const auto f = mode_field(mode, geom, 20000.0, 0.0);
    for (auto v : {f.e_r, f.e_phi, f.e_z, f.h_r, f.h_phi, f.h_z}) {
        CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("axial Poynting flux integrates to one (independent quadrature)") {
    const auto geom = paper_geometry();
    const GuidedMode mode = solve_fundamental_mode(geom, 620.0);
    // Trapezoid oracle on a dense uniform grid, nothing shared with the
    // solver's normalization quadrature.
    const int n = 400000;
    const double r_max = 6000.0;
    const double h = r_max / n;
    double acc = 0.0, prev = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double r = i * h;
        const auto f = mode_field(mode, geom, r, 0.0);
        const double sz = 0.5 * std::real(f.e_r * std::conj(f.h_phi) -
                                          f.e_phi * std::conj(f.h_r));
        const double cur = sz * r;
        acc += 0.5 * (prev + cur) * h;
        prev = cur;
    }
    acc *= 2.0 * kPi;
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("determinism: repeated solves are bit-identical") {
    const GuidedMode a = solve_fundamental_mode(paper_geometry(), 620.0);
    const GuidedMode b = solve_fundamental_mode(paper_geometry(), 620.0);
    CHECK(a.n_eff == b.n_eff);
    CHECK(a.layer_coefficients == b.layer_coefficients);
}

TEST_CASE("neff curve: decreasing in d_in, increasing in d_out") {
    std::vector<std::pair<double, double>> din_sweep;
    for (double d = 100.0; d <= 150.0; d += 10.0) din_sweep.push_back({d, 530.0});
    const auto din_curve = neff_curve(paper_geometry(), din_sweep, 620.0, {}, 4);
    CHECK(din_curve.points.size() == din_sweep.size());
    CHECK(din_curve.strictly_decreasing);
    CHECK_FALSE(din_curve.strictly_increasing);

    std::vector<std::pair<double, double>> dout_sweep;
    for (double d = 505.0; d <= 540.0; d += 7.0) dout_sweep.push_back({125.0, d});
    const auto dout_curve = neff_curve(paper_geometry(), dout_sweep, 620.0, {}, 4);
    CHECK(dout_curve.strictly_increasing);

    // Parallel evaluation returns identical values in input order.
    const auto serial = neff_curve(paper_geometry(), din_sweep, 620.0, {}, 1);
    for (size_t i = 0; i < serial.points.size(); ++i) {
        CHECK(serial.points[i].n_eff == din_curve.points[i].n_eff);
    }
}

TEST_CASE("neff curve: per-point failures recorded, sweep continues") {
    std::vector<std::pair<double, double>> sweep{{2.0, 10.0}, {125.0, 515.0}};
    const auto curve = neff_curve(paper_geometry(), sweep, 620.0, {}, 2);
    REQUIRE(curve.points.size() == 2);
    CHECK_FALSE(curve.points[0].error.empty());
    CHECK(curve.points[1].error.empty());
    CHECK(curve.points[1].n_eff > 1.0);
}

TEST_CASE("empty sweep gives empty result") {
    const auto curve = neff_curve(paper_geometry(), {}, 620.0);
    CHECK(curve.points.empty());
}

TEST_CASE("strict bounds: n_clad < n_eff < max layer index") {
    for (double d_out : {480.0, 515.0, 560.0}) {
        LayeredFiberGeometry g = paper_geometry();
        g.d_out_nm = d_out;
        const GuidedMode m = solve_fundamental_mode(g, 620.0);
        CHECK(m.n_eff > 1.0);
        CHECK(m.n_eff < 1.457);
    }
}

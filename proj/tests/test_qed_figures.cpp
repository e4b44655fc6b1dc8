#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "capcav/constants.hpp"
#include "capcav/errors.hpp"
#include "capcav/qed_figures.hpp"

using namespace capcav;

namespace {

std::vector<MirrorScanPoint> synthetic_points(double kappa_sc,
                                              const std::vector<double>& kappas,
                                              std::mt19937* noise_rng = nullptr,
                                              double noise = 0.0) {
    std::vector<MirrorScanPoint> pts;
    int n = 200;
    for (double k : kappas) {
        const auto [t0, r0] = on_resonance_TR(k, kappa_sc);
        double jt = 1.0, jr = 1.0;
        if (noise_rng != nullptr && noise > 0.0) {
            std::normal_distribution<double> d(1.0, noise);
            jt = d(*noise_rng);
            jr = d(*noise_rng);
        }
        pts.push_back({n, k, t0 * jt, r0 * jr});
        n += 50;
    }
    return pts;
}

} // namespace

TEST_CASE("kappa from linewidth") {
    CHECK(kappa_from_linewidth({619.0, 0.248}) ==
          doctest::Approx(194.0).epsilon(0.001));
    // Independent hand evaluation of the same formula.
    CHECK(kappa_from_linewidth({618.0, 0.655}) ==
          doctest::Approx(514.1).epsilon(0.002));
    // Vanishing linewidth limit.
    CHECK(kappa_from_linewidth({619.0, 1e-9}) < 1e-6);
    CHECK_THROWS_AS(kappa_from_linewidth({619.0, 0.0}), DomainError);
    CHECK_THROWS_AS(kappa_from_linewidth({619.0, 620.0}), DomainError);
}

TEST_CASE("quality factor") {
    CHECK(quality_factor({619.0, 0.248}) ==
          doctest::Approx(2496.0).epsilon(0.0005));
    CHECK(quality_factor({618.0, 0.655}) ==
          doctest::Approx(943.5).epsilon(0.0005));
    CHECK(quality_factor({619.0, 618.999999}) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("on-resonance T0/R0") {
    const auto [t_lossless, r_lossless] = on_resonance_TR(193.0, 0.0);
    CHECK(t_lossless == 1.0);
    CHECK(r_lossless == 0.0);

    const auto [t_eq, r_eq] = on_resonance_TR(100.0, 50.0);
    CHECK(t_eq == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r_eq == doctest::Approx(0.25).epsilon(1e-12));

    const auto [t_paper, r_paper] = on_resonance_TR(193.0, 18.0);
    CHECK(t_paper == doctest::Approx(0.822).epsilon(0.001));
    CHECK(r_paper == doctest::Approx(0.0087).epsilon(0.01));

    CHECK_THROWS_AS(on_resonance_TR(100.0, 101.0), DomainError);
}

TEST_CASE("T0 + R0 never exceeds one") {
    for (int i = 0; i <= 100; ++i) {
        const double x = i / 100.0;
        const auto [t0, r0] = on_resonance_TR(200.0, 200.0 * x);
        CHECK(t0 + r0 <= 1.0 + 1e-12);
        CHECK(t0 + r0 ==
              doctest::Approx(((1.0 - x) * (1.0 - x) + x * x)).epsilon(1e-9));
    }
}

TEST_CASE("fit recovers a noiseless synthetic kappa_sc exactly") {
    const auto pts = synthetic_points(18.0, {110, 160, 220, 290, 360, 430});
    const auto fit = fit_kappa_sc(pts);
    CHECK(fit.kappa_sc_ghz == doctest::Approx(18.0).epsilon(0.0006));
    CHECK(fit.rms_residual < 1e-4);
}

TEST_CASE("fit recovery property over random draws") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> kappa_sc_dist(0.5, 80.0);
    std::uniform_real_distribution<double> kappa_dist(90.0, 900.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> kappas;
        for (int i = 0; i < 7; ++i) {
            double k;
            do {
                k = kappa_dist(rng);
            } while ([&] {
                for (double kk : kappas) {
                    if (std::abs(kk - k) < 1.0) return true;
                }
                return false;
            }());
            kappas.push_back(k);
        }
        const double truth =
            std::min(kappa_sc_dist(rng), *std::min_element(kappas.begin(),
                                                           kappas.end()) -
                                             1.0);
        const auto fit = fit_kappa_sc(synthetic_points(truth, kappas));
        CHECK(std::abs(fit.kappa_sc_ghz - truth) / truth <= 0.001);
    }
}

TEST_CASE("fit with 1% multiplicative noise stays within 1 GHz") {
    std::mt19937 rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto pts = synthetic_points(
            18.0, {110, 160, 220, 290, 360, 430}, &rng, 0.01);
        const auto fit = fit_kappa_sc(pts);
        worst = std::max(worst, std::abs(fit.kappa_sc_ghz - 18.0));
    }
    CHECK(worst < 1.0);
}

TEST_CASE("fit input validation") {
    CHECK_THROWS_AS(fit_kappa_sc({}), DomainError);
    std::vector<MirrorScanPoint> two = {{200, 100.0, 0.8, 0.01},
                                        {250, 150.0, 0.9, 0.005}};
    CHECK_THROWS_AS(fit_kappa_sc(two), DomainError);
    std::vector<MirrorScanPoint> dup = {{200, 100.0, 0.8, 0.01},
                                        {250, 100.0, 0.9, 0.005},
                                        {300, 150.0, 0.95, 0.001}};
    CHECK_THROWS_AS(fit_kappa_sc(dup), DomainError);
    std::vector<MirrorScanPoint> zeros = {{200, 100.0, 0.0, 0.0},
                                          {250, 150.0, 0.0, 0.0},
                                          {300, 200.0, 0.0, 0.0}};
    CHECK_THROWS_AS(fit_kappa_sc(zeros), DomainError);
}

TEST_CASE("finesse") {
    CHECK(finesse(28.0, 193.0) == doctest::Approx(27.7).epsilon(0.002));
    CHECK(finesse(28.0, 18.0) == doctest::Approx(297.4).epsilon(0.001));
    CHECK(finesse(56.0, 193.0) ==
          doctest::Approx(0.5 * finesse(28.0, 193.0)).epsilon(1e-12));
    CHECK_THROWS_AS(finesse(0.0, 193.0), DomainError);
}

TEST_CASE("scattering-limited quality factor") {
    CHECK(scattering_q(619.0, 18.0) == doctest::Approx(26906.0).epsilon(0.001));
    CHECK(scattering_q(620.0, 18.0) == doctest::Approx(26863.0).epsilon(0.001));
    CHECK(scattering_q(619.0, 1e9) < 1e-3);
}

TEST_CASE("one-pass loss") {
    CHECK(one_pass_loss(297.0) == doctest::Approx(0.010577).epsilon(0.001));
    CHECK(one_pass_loss(kPi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(one_pass_loss(594.0) == doctest::Approx(0.005289).epsilon(0.001));
    CHECK_THROWS_AS(one_pass_loss(0.0), DomainError);
}

TEST_CASE("single-photon Rabi frequency and Purcell factor") {
    CHECK(rabi_from_purcell(11.0, 193.0, 1.2) ==
          doctest::Approx(50.5).epsilon(0.002));
    CHECK(rabi_from_purcell(1.0, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(purcell(50.0, 193.0, 1.2) == doctest::Approx(10.79).epsilon(0.001));
    CHECK(purcell(0.0, 193.0, 1.2) == 0.0);

    // Round trip is the identity.
    const double fp = purcell(rabi_from_purcell(11.0, 193.0, 1.2), 193.0, 1.2);
    CHECK(fp == doctest::Approx(11.0).epsilon(1e-9));
    const double g = rabi_from_purcell(purcell(50.5, 193.0, 1.2), 193.0, 1.2);
    CHECK(g == doctest::Approx(50.5).epsilon(1e-9));
}

TEST_CASE("cavity-enhanced channeling efficiency") {
    CHECK(cavity_enhanced_eta(11.0, 0.52) ==
          doctest::Approx(0.9226).epsilon(0.0005));
    for (double b : {0.1, 0.4, 0.52, 0.9}) {
        CHECK(cavity_enhanced_eta(1.0, b) == doctest::Approx(b).epsilon(1e-12));
    }
    CHECK(cavity_enhanced_eta(1e12, 0.52) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(cavity_enhanced_eta(-1.0, 0.5), DomainError);
}

TEST_CASE("eta monotone in both arguments") {
    double prev = 0.0;
    for (double fp = 0.5; fp < 40.0; fp += 0.5) {
        const double eta = cavity_enhanced_eta(fp, 0.52);
        CHECK(eta >= prev);
        prev = eta;
    }
    prev = 0.0;
    for (double b = 0.05; b <= 0.95; b += 0.05) {
        const double eta = cavity_enhanced_eta(11.0, b);
        CHECK(eta >= prev);
        prev = eta;
    }
}

TEST_CASE("channeling efficiency ratio") {
    CHECK(channeling_efficiency(0.87, 1.0) == doctest::Approx(0.87));
    CHECK(channeling_efficiency(0.0, 1.0) == 0.0);
    CHECK(channeling_efficiency(0.35, 0.35) == doctest::Approx(1.0));
    CHECK_THROWS_AS(channeling_efficiency(1.2, 1.0), DomainError);
    CHECK_THROWS_AS(channeling_efficiency(0.5, 0.0), DomainError);
}

TEST_CASE("gamma scaling: 2g0 grows as sqrt(gamma), eta unchanged") {
    const double g1 = rabi_from_purcell(11.0, 193.0, 1.2);
    const double g2 = rabi_from_purcell(11.0, 193.0, 2.4);
    CHECK(g2 == doctest::Approx(g1 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(cavity_enhanced_eta(11.0, 0.52) == cavity_enhanced_eta(11.0, 0.52));
}

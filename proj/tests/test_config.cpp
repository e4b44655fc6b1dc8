#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "capcav/config.hpp"
#include "capcav/errors.hpp"

using namespace capcav;

TEST_CASE("minimal config keeps the reference defaults") {
    const RunConfig cfg = parse_config("geometry.d_in_nm = 125\n");
    CHECK(cfg.period_nm == 244.0);
    CHECK(cfg.defect_width() == doctest::Approx(366.0));
    CHECK(cfg.d_out_nm == 515.0);
    CHECK(cfg.slat_count == 400);
    CHECK(cfg.gamma_ghz == 1.2);
}

TEST_CASE("defect width follows the period unless set") {
    const RunConfig a = parse_config("grating.period_nm = 300\n");
    CHECK(a.defect_width() == doctest::Approx(450.0));
    const RunConfig b =
        parse_config("grating.period_nm = 300\ngrating.defect_width_nm = 400\n");
    CHECK(b.defect_width() == doctest::Approx(400.0));
}

TEST_CASE("duty cycle violation is reported with the documented message") {
    try {
        parse_config("grating.duty_cycle = 1.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].message == "duty_cycle must be in (0,1)");
    }
}

TEST_CASE("empty file is a syntax error at line 1") {
    try {
        parse_config("");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].line == 1);
    }
    CHECK_THROWS_AS(parse_config("   \n# only a comment\n"), ConfigError);
}

TEST_CASE("all violations are collected, not just the first") {
    const std::string text =
        "grating.duty_cycle = 1.5\n"
        "geometry.d_in_nm = 600\n"   // exceeds d_out
        "emitter.beta0 = 2\n"
        "grating.slat_count = 401\n";
    try {
        parse_config(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() == 4);
    }
}

TEST_CASE("syntax errors carry line numbers") {
    try {
        parse_config("geometry.d_in_nm = 125\nnot a key value pair\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].line == 2);
    }
    try {
        parse_config("geometry.d_in_nm = abc\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].line == 1);
    }
}

TEST_CASE("unknown keys are violations") {
    CHECK_THROWS_AS(parse_config("grating.unknown_key = 1\n"), ConfigError);
}

TEST_CASE("comments and blank lines are ignored") {
    const RunConfig cfg = parse_config(
        "# header comment\n"
        "\n"
        "geometry.d_in_nm = 120  # inline comment\n");
    CHECK(cfg.d_in_nm == 120.0);
}

TEST_CASE("config hash is stable and value-sensitive") {
    const RunConfig a = parse_config("geometry.d_in_nm = 125\n");
    const RunConfig b = parse_config(
        "# different formatting, same values\n"
        "geometry.d_in_nm   =   125\n");
    const RunConfig c = parse_config("geometry.d_in_nm = 126\n");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
    CHECK(config_hash(a) == config_hash(a));
}

TEST_CASE("canonical serialization covers every key round-trip") {
    RunConfig cfg;
    cfg.d_in_nm = 123.0;
    cfg.delta_n = 0.0234;
    cfg.formats = "csv";
    const RunConfig reparsed = parse_config(canonical_config(cfg));
    CHECK(config_hash(reparsed) == config_hash(cfg));
    CHECK(reparsed.delta_n.has_value());
    CHECK(*reparsed.delta_n == 0.0234);
}

TEST_CASE("optional keys default to unset") {
    const RunConfig cfg = parse_config("geometry.d_in_nm = 125\n");
    CHECK_FALSE(cfg.delta_n.has_value());
    CHECK_FALSE(cfg.slat_loss.has_value());
    CHECK_FALSE(cfg.base_n_eff.has_value());
}

TEST_CASE("report targets are configurable") {
    const RunConfig cfg = parse_config("report.tol_q = 0\nreport.q_y = 2500\n");
    CHECK(cfg.report.tol_q == 0.0);
    CHECK(cfg.report.q_y == 2500.0);
}

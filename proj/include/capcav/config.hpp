#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "capcav/emitter_coupling.hpp"
#include "capcav/geometry.hpp"
#include "capcav/grating_cavity.hpp"
#include "capcav/qed_figures.hpp"

namespace capcav {

// Reference values and comparison tolerances for the reproduce-paper report.
// Relative tolerances are fractions; *_pp and *_nm entries are absolute.
struct ReportTargets {
    double q_y = 2498.0;
    double q_x = 944.0;
    double kappa_ghz = 193.0;
    double kappa_sc_ghz = 18.0;
    double q_sc = 26894.0;
    double finesse = 28.0;
    double finesse_sc = 297.0;
    double one_pass_loss = 0.0104;
    double two_g0_ghz = 50.0;
    double eta_cav = 0.93;
    double eta_fdtd = 0.87;
    double l_eff_um = 28.0;
    double measure_y_lambda_nm = 619.0;
    double measure_y_fwhm_nm = 0.248;
    double measure_x_lambda_nm = 618.0;
    double measure_x_fwhm_nm = 0.655;

    double tol_q = 0.002;
    double tol_kappa = 0.01;
    double tol_q_sc = 0.005;
    double tol_finesse = 0.05;
    double tol_finesse_sc = 0.01;
    double tol_one_pass_loss = 0.05;
    double tol_two_g0 = 0.02;
    double tol_eta_cav_pp = 0.02;
    double tol_eta_fdtd = 1e-9;
    double tol_lambda_res_nm = 0.5;
    double tol_q_cav = 0.15;
    double tol_kappa_sc = 0.05;
    double l_eff_lo_um = 20.0;
    double l_eff_hi_um = 40.0;
};

// One flat, validated run configuration. Defaults reproduce the reference
// cavity; a minimal config file can set any subset of keys.
struct RunConfig {
    // geometry.*
    double d_in_nm = 125.0;
    double d_out_nm = 515.0;
    std::string core_material = "water";
    std::string shell_material = "silica";
    std::string cladding_material = "vacuum";
    double wavelength_nm = 620.0;

    // grating.*
    double period_nm = 244.0;
    double duty_cycle = 0.15;
    int slat_count = 400;
    std::optional<double> defect_width_nm; // default 1.5 * period
    double slat_height_um = 2.0;
    std::string polarization = "y";
    std::optional<double> delta_n;    // absent: calibrate to targets
    std::optional<double> base_n_eff; // absent: mode solve + calibration
    std::optional<double> slat_loss;  // absent: calibrate to kappa_sc target
    double target_lambda_res_nm = 619.0;
    double target_stopband_nm = 5.8;
    double target_kappa_sc_ghz = 18.0;

    // emitter.*
    double gamma_ghz = 1.2;
    double beta0 = 0.52;
    double purcell = 11.0;
    double delta_z_nm = 0.0;
    double radial_offset_nm = 0.0;
    double theta_rad = 0.0;
    std::string pol_axis = "y";

    // coupling.*
    CouplingSurrogate coupling = CouplingSurrogate::paper_centered();

    // spectrum.*
    double grid_lo_nm = 600.0;
    double grid_hi_nm = 640.0;
    double coarse_step_nm = 0.1;
    double fine_step_nm = 0.01;

    // sweep.*
    std::string sweep_parameter = "grating.slat_count";
    double sweep_from = 200.0;
    double sweep_to = 500.0;
    double sweep_step = 50.0;

    // output.*
    std::string out_dir = "out";
    std::string formats = "both"; // csv | json | both
    bool svg = false;

    // report.*
    ReportTargets report;

    double defect_width() const {
        return defect_width_nm ? *defect_width_nm : 1.5 * period_nm;
    }

    LayeredFiberGeometry geometry() const;
    EmitterSpec emitter() const;
    ScanGrid scan_grid() const;
    PolarizationAxis emitter_axis() const;

    // Grating spec with delta_n / base_n_eff / slat_loss taken from the
    // config verbatim (zero / placeholder when unset); calibration-based
    // resolution lives in the pipeline layer.
    GratingCavitySpec grating_template() const;
};

// Parses the documented flat key-value format ("section.key = value", '#'
// comments). Throws ConfigError carrying every violation found, with line
// numbers; an empty file is a syntax error at line 1.
RunConfig parse_config(const std::string& text);

// parse_config over a file's contents. Throws IoError when unreadable.
RunConfig load_config_file(const std::string& path);

// Canonical "key = value" serialization (sorted keys, every key present).
// Two configs serialize identically iff they are equivalent.
std::string canonical_config(const RunConfig& config);

// FNV-1a over the canonical serialization; stable across runs.
std::uint64_t config_hash(const RunConfig& config);

} // namespace capcav

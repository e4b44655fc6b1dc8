#pragma once

#include <string>
#include <vector>

#include "capcav/config.hpp"
#include "capcav/grating_cavity.hpp"

namespace capcav {

// Config resolved into a runnable cavity: bare fiber index from the mode
// solver, contrast/loss either taken from the config or calibrated to its
// targets. bragg_offset is the calibration shift applied on top of the bare
// n_eff, reused when sweeps move the geometry.
struct ResolvedCavity {
    GratingCavitySpec spec;
    double bare_n_eff = 0.0;
    double bragg_offset = 0.0;
    bool contrast_calibrated = false;
    bool loss_calibrated = false;
};

ResolvedCavity resolve_cavity(const RunConfig& config, int jobs);

struct SweepRow {
    double parameter_value = 0.0;
    double n_eff = 0.0;
    double lambda_res_nm = 0.0;
    double fwhm_nm = 0.0;
    double q = 0.0;
    double t0 = 0.0;
    double r0 = 0.0;
    double kappa_ghz = 0.0;
    double eta_cav_est = 0.0;
    std::string error; // empty on success; other fields zero when set
};

struct SweepResult {
    std::string parameter;
    std::vector<SweepRow> rows; // ordered by parameter value
};

// Names accepted in sweep.parameter.
const std::vector<std::string>& sweepable_parameters();

// Per-point pipeline (mode solve where geometry moves, spectrum, resonance,
// figure estimates). Points run on a worker pool of `jobs` threads; row order
// and contents are independent of the pool size.
SweepResult run_sweep(const RunConfig& config, int jobs);

std::string sweep_csv(const SweepResult& result, const struct Provenance& prov);
std::string sweep_json(const SweepResult& result, const struct Provenance& prov);

} // namespace capcav

#include "capcav/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "capcav/errors.hpp"
#include "capcav/mode_solver.hpp"
#include "capcav/output.hpp"
#include "capcav/qed_figures.hpp"

namespace capcav {

namespace {

bool is_geometry_parameter(const std::string& name) {
    return name == "geometry.d_in_nm" || name == "geometry.d_out_nm";
}

void apply_parameter(RunConfig& cfg, const std::string& name, double value) {
    if (name == "geometry.d_in_nm") {
        cfg.d_in_nm = value;
    } else if (name == "geometry.d_out_nm") {
        cfg.d_out_nm = value;
    } else if (name == "grating.slat_count") {
        cfg.slat_count = static_cast<int>(value);
    } else if (name == "grating.duty_cycle") {
        cfg.duty_cycle = value;
    } else if (name == "grating.period_nm") {
        cfg.period_nm = value;
    } else if (name == "grating.delta_n") {
        cfg.delta_n = value;
    } else {
        throw ConfigError({{0, "unsupported sweep parameter '" + name + "'"}});
    }
}

} // namespace

const std::vector<std::string>& sweepable_parameters() {
    static const std::vector<std::string> names = {
        "geometry.d_in_nm",  "geometry.d_out_nm", "grating.slat_count",
        "grating.duty_cycle", "grating.period_nm", "grating.delta_n",
    };
    return names;
}

ResolvedCavity resolve_cavity(const RunConfig& config, int jobs) {
    ResolvedCavity out;
    out.spec = config.grating_template();

    if (config.base_n_eff) {
        out.bare_n_eff = *config.base_n_eff;
    } else {
        out.bare_n_eff =
            solve_fundamental_mode(config.geometry(), config.wavelength_nm)
                .n_eff;
    }

    if (config.delta_n) {
        out.spec.delta_n = *config.delta_n;
        out.spec.base_n_eff = config.base_n_eff.value_or(out.bare_n_eff);
    } else {
        GratingCavitySpec tpl = out.spec;
        tpl.base_n_eff = out.bare_n_eff;
        tpl.slat_loss = 1.0; // contrast targets are measured lossless
        const CalibrationTargets targets{config.target_lambda_res_nm,
                                         config.target_stopband_nm};
        const auto cal = calibrate_contrast(targets, tpl, 60, jobs);
        out.spec.delta_n = cal.delta_n;
        out.spec.base_n_eff = cal.base_n_eff;
        out.contrast_calibrated = true;
    }
    out.bragg_offset = out.spec.base_n_eff - out.bare_n_eff;

    if (config.slat_loss) {
        out.spec.slat_loss = *config.slat_loss;
    } else if (config.target_kappa_sc_ghz > 0.0) {
        out.spec.slat_loss =
            calibrate_slat_loss(config.target_kappa_sc_ghz, out.spec, jobs);
        out.loss_calibrated = true;
    } else {
        out.spec.slat_loss = 1.0;
    }
    return out;
}

SweepResult run_sweep(const RunConfig& config, int jobs) {
    SweepResult result;
    result.parameter = config.sweep_parameter;

    // Validate the name up front; a bad parameter is a config error.
    const auto& names = sweepable_parameters();
    if (std::find(names.begin(), names.end(), config.sweep_parameter) ==
        names.end()) {
        throw ConfigError(
            {{0, "unsupported sweep parameter '" + config.sweep_parameter + "'"}});
    }

    std::vector<double> values;
    for (double v = config.sweep_from; v <= config.sweep_to + 1e-12;
         v += config.sweep_step) {
        values.push_back(v);
    }
    result.rows.resize(values.size());
    if (values.empty()) return result;

    // Shared calibration at the reference configuration.
    const ResolvedCavity ref = resolve_cavity(config, jobs);
    const bool moves_geometry = is_geometry_parameter(config.sweep_parameter);
    const double two_g0_ref = rabi_from_purcell(
        std::max(config.purcell, 1e-12), config.report.kappa_ghz,
        config.gamma_ghz);

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            SweepRow& row = result.rows[i];
            row.parameter_value = values[i];
            try {
                RunConfig point = config;
                apply_parameter(point, config.sweep_parameter, values[i]);

                GratingCavitySpec spec = point.grating_template();
                spec.delta_n = ref.spec.delta_n;
                spec.slat_loss = ref.spec.slat_loss;
                if (moves_geometry) {
                    row.n_eff = solve_fundamental_mode(point.geometry(),
                                                       point.wavelength_nm)
                                    .n_eff;
                    spec.base_n_eff = row.n_eff + ref.bragg_offset;
                } else {
                    row.n_eff = ref.bare_n_eff;
                    spec.base_n_eff = ref.spec.base_n_eff;
                }

                const auto scan =
                    resonance_scan(spec, point.scan_grid(), {}, 1);
                row.lambda_res_nm = scan.report.lambda_res_nm;
                row.fwhm_nm = scan.report.fwhm_nm;
                row.q = scan.report.q;
                row.t0 = scan.report.t0;
                row.r0 = scan.report.r0;
                row.kappa_ghz = kappa_from_linewidth(
                    {row.lambda_res_nm, row.fwhm_nm, spec.polarization});
                const double purcell_pt =
                    two_g0_ref * two_g0_ref /
                    (row.kappa_ghz * config.gamma_ghz);
                row.eta_cav_est = cavity_enhanced_eta(purcell_pt, config.beta0);
            } catch (const Error& e) {
                row = SweepRow{};
                row.parameter_value = values[i];
                row.error = e.what();
            }
        }
    };

    const int n_threads =
        std::max(1, std::min<int>(jobs, static_cast<int>(values.size())));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return result;
}

std::string sweep_csv(const SweepResult& result, const Provenance& prov) {
    std::string out = prov.csv_comment();
    out += "parameter,n_eff,lambda_res_nm,delta_lambda_nm,q,t0,r0,kappa_ghz,"
           "eta_cav_est,error\n";
    for (const auto& r : result.rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        out += fmt9(r.parameter_value);
        out += ',';
        out += fmt9(r.n_eff);
        out += ',';
        out += fmt9(r.lambda_res_nm);
        out += ',';
        out += fmt9(r.fwhm_nm);
        out += ',';
        out += fmt9(r.q);
        out += ',';
        out += fmt9(r.t0);
        out += ',';
        out += fmt9(r.r0);
        out += ',';
        out += fmt9(r.kappa_ghz);
        out += ',';
        out += fmt9(r.eta_cav_est);
        out += ',';
        out += err;
        out += '\n';
    }
    return out;
}

std::string sweep_json(const SweepResult& result, const Provenance& prov) {
    std::string out = "{\n";
    out += "  \"parameter\": \"" + result.parameter + "\",\n";
    out += "  \"rows\": [\n";
    for (size_t i = 0; i < result.rows.size(); ++i) {
        const auto& r = result.rows[i];
        std::string err = r.error;
        std::replace(err.begin(), err.end(), '"', '\'');
        out += "    {\"parameter\": " + fmt9(r.parameter_value) +
               ", \"n_eff\": " + fmt9(r.n_eff) +
               ", \"lambda_res_nm\": " + fmt9(r.lambda_res_nm) +
               ", \"delta_lambda_nm\": " + fmt9(r.fwhm_nm) +
               ", \"q\": " + fmt9(r.q) + ", \"t0\": " + fmt9(r.t0) +
               ", \"r0\": " + fmt9(r.r0) +
               ", \"kappa_ghz\": " + fmt9(r.kappa_ghz) +
               ", \"eta_cav_est\": " + fmt9(r.eta_cav_est) + ", \"error\": \"" +
               err + "\"}";
        out += (i + 1 < result.rows.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += "  \"provenance\": {\"toolkit_version\": \"" + prov.version +
           "\", \"config_hash\": \"" + prov.hash_hex() + "\"}\n";
    out += "}\n";
    return out;
}

} // namespace capcav

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "capcav/config.hpp"
#include "capcav/errors.hpp"
#include "capcav/mode_solver.hpp"
#include "capcav/output.hpp"
#include "capcav/report.hpp"
#include "capcav/sweep.hpp"
#include "capcav/version.hpp"

namespace {

using namespace capcav;

// Exit codes: 1 comparison fail, 2 physics failure, 3 I/O or format,
// 4 config.
constexpr int kExitCompare = 1;
constexpr int kExitPhysics = 2;
constexpr int kExitIo = 3;
constexpr int kExitConfig = 4;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    std::string format;
    bool svg = false;
};

RunConfig effective_config(const GlobalOpts& g) {
    RunConfig cfg;
    std::string path = g.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("CAPCAV_DEFAULT_CONFIG")) path = env;
    }
    if (!path.empty()) cfg = load_config_file(path);
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    if (!g.format.empty()) cfg.formats = g.format;
    if (g.svg) cfg.svg = true;
    return cfg;
}

int effective_jobs(const GlobalOpts& g) {
    if (g.jobs > 0) return g.jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

Provenance provenance_of(const RunConfig& cfg) {
    return {kToolkitVersion, config_hash(cfg)};
}

bool wants_csv(const RunConfig& c) { return c.formats != "json"; }
bool wants_json(const RunConfig& c) { return c.formats != "csv"; }

std::string out_path(const RunConfig& c, const std::string& name) {
    return c.out_dir + "/" + name;
}

int cmd_mode_solve(const GlobalOpts& g) {
    const RunConfig cfg = effective_config(g);
    const auto geom = cfg.geometry();
    const GuidedMode mode = solve_fundamental_mode(geom, cfg.wavelength_nm);
    const Provenance prov = provenance_of(cfg);

    std::printf("fundamental mode at %.6g nm\n", cfg.wavelength_nm);
    std::printf("  %-16s %s\n", "n_eff", fmt9(mode.n_eff).c_str());
    std::printf("  %-16s %s\n", "beta [rad/m]", fmt9(mode.beta_rad_per_m).c_str());
    std::printf("  %-16s %d\n", "azimuthal order", mode.azimuthal_order);
    std::printf("  %-16s %g / %g nm\n", "d_in / d_out", cfg.d_in_nm, cfg.d_out_nm);

    if (wants_json(cfg)) {
        std::string json = "{\n";
        json += "  \"wavelength_nm\": " + fmt9(mode.wavelength_nm) + ",\n";
        json += "  \"n_eff\": " + fmt9(mode.n_eff) + ",\n";
        json += "  \"beta_rad_per_m\": " + fmt9(mode.beta_rad_per_m) + ",\n";
        json += "  \"azimuthal_order\": " +
                std::to_string(mode.azimuthal_order) + ",\n";
        json += "  \"d_in_nm\": " + fmt9(cfg.d_in_nm) + ",\n";
        json += "  \"d_out_nm\": " + fmt9(cfg.d_out_nm) + ",\n";
        json += "  \"provenance\": {\"toolkit_version\": \"" + prov.version +
                "\", \"config_hash\": \"" + prov.hash_hex() + "\"}\n}\n";
        write_text_file(out_path(cfg, "mode.json"), json);
        std::printf("wrote %s\n", out_path(cfg, "mode.json").c_str());
    }
    return 0;
}

int cmd_spectrum(const GlobalOpts& g) {
    const RunConfig cfg = effective_config(g);
    const int jobs = effective_jobs(g);
    const ResolvedCavity cavity = resolve_cavity(cfg, jobs);
    const auto scan = resonance_scan(cavity.spec, cfg.scan_grid(), {}, jobs);
    const Provenance prov = provenance_of(cfg);

    if (wants_csv(cfg)) {
        write_text_file(out_path(cfg, "spectrum.csv"),
                        spectrum_csv(scan.spectrum, prov));
        std::printf("wrote %s\n", out_path(cfg, "spectrum.csv").c_str());
    }
    if (cfg.svg) {
        SvgSeries t{scan.spectrum.wavelengths_nm, scan.spectrum.transmission};
        SvgSeries r{scan.spectrum.wavelengths_nm, scan.spectrum.reflection};
        write_text_file(out_path(cfg, "spectrum.svg"),
                        line_plot_svg("cavity spectrum", "wavelength [nm]",
                                      "T / R", {t, r}));
        std::printf("wrote %s\n", out_path(cfg, "spectrum.svg").c_str());
    }
    std::printf("stop band [%.6g, %.6g] nm, lambda_res %.6g nm, FWHM %.4g nm, "
                "Q %.6g, T0 %.4g\n",
                scan.report.stopband_lo_nm, scan.report.stopband_hi_nm,
                scan.report.lambda_res_nm, scan.report.fwhm_nm, scan.report.q,
                scan.report.t0);
    return 0;
}

std::string resonance_json(const ResonanceReport& r, const Provenance& prov) {
    std::string json = "{\n";
    json += "  \"lambda_res_nm\": " + fmt9(r.lambda_res_nm) + ",\n";
    json += "  \"delta_lambda_nm\": " + fmt9(r.fwhm_nm) + ",\n";
    json += "  \"t0\": " + fmt9(r.t0) + ",\n";
    json += "  \"r0\": " + fmt9(r.r0) + ",\n";
    json += "  \"q\": " + fmt9(r.q) + ",\n";
    json += "  \"stopband_lo_nm\": " + fmt9(r.stopband_lo_nm) + ",\n";
    json += "  \"stopband_hi_nm\": " + fmt9(r.stopband_hi_nm) + ",\n";
    json += "  \"provenance\": {\"toolkit_version\": \"" + prov.version +
            "\", \"config_hash\": \"" + prov.hash_hex() + "\"}\n}\n";
    return json;
}

int cmd_resonance(const GlobalOpts& g) {
    const RunConfig cfg = effective_config(g);
    const int jobs = effective_jobs(g);
    const ResolvedCavity cavity = resolve_cavity(cfg, jobs);
    const auto scan = resonance_scan(cavity.spec, cfg.scan_grid(), {}, jobs);
    const Provenance prov = provenance_of(cfg);

    std::printf("lambda_res   %.6g nm\n", scan.report.lambda_res_nm);
    std::printf("delta_lambda %.6g nm\n", scan.report.fwhm_nm);
    std::printf("Q            %.6g\n", scan.report.q);
    std::printf("T0 / R0      %.6g / %.6g\n", scan.report.t0, scan.report.r0);
    std::printf("stop band    [%.6g, %.6g] nm\n", scan.report.stopband_lo_nm,
                scan.report.stopband_hi_nm);
    if (wants_json(cfg)) {
        write_text_file(out_path(cfg, "resonance.json"),
                        resonance_json(scan.report, prov));
        std::printf("wrote %s\n", out_path(cfg, "resonance.json").c_str());
    }
    return 0;
}

int cmd_figures(const GlobalOpts& g) {
    const RunConfig cfg = effective_config(g);
    const int jobs = effective_jobs(g);
    const ResolvedCavity cavity = resolve_cavity(cfg, jobs);
    const auto scan = resonance_scan(cavity.spec, cfg.scan_grid(), {}, jobs);

    const LinewidthMeasurement measurement{scan.report.lambda_res_nm,
                                           scan.report.fwhm_nm,
                                           cavity.spec.polarization};
    FigureSetOptions opts;
    opts.grid = cfg.scan_grid();
    opts.jobs = jobs;
    const QedFigureSet figures =
        figure_set(cavity.spec, cfg.emitter(), measurement, cfg.purcell, opts);
    const Provenance prov = provenance_of(cfg);

    const std::string json = figure_set_json(figures, prov);
    std::fputs(json.c_str(), stdout);
    if (wants_json(cfg)) {
        write_text_file(out_path(cfg, "figures.json"), json);
        std::printf("wrote %s\n", out_path(cfg, "figures.json").c_str());
    }
    return 0;
}

int cmd_fit_kappa_sc(const GlobalOpts& g) {
    const RunConfig cfg = effective_config(g);
    const int jobs = effective_jobs(g);
    const ResolvedCavity cavity = resolve_cavity(cfg, jobs);

    FigureSetOptions opts;
    opts.grid = cfg.scan_grid();
    opts.jobs = jobs;
    const auto points = mirror_scan_points(cavity.spec, opts, jobs);
    const auto fit = fit_kappa_sc(points);
    const Provenance prov = provenance_of(cfg);

    std::printf("kappa_sc = %.6g GHz (rms residual %.4g, %zu points)\n",
                fit.kappa_sc_ghz, fit.rms_residual, points.size());
    if (wants_csv(cfg)) {
        std::string csv = prov.csv_comment();
        csv += "n_slats,kappa_ghz,t0,r0\n";
        for (const auto& p : points) {
            csv += std::to_string(p.slat_count) + ',' + fmt9(p.kappa_ghz) +
                   ',' + fmt9(p.t0) + ',' + fmt9(p.r0) + '\n';
        }
        write_text_file(out_path(cfg, "mirror_scan.csv"), csv);
        std::printf("wrote %s\n", out_path(cfg, "mirror_scan.csv").c_str());
    }
    if (wants_json(cfg)) {
        std::string json = "{\n  \"kappa_sc_ghz\": " + fmt9(fit.kappa_sc_ghz) +
                           ",\n  \"rms_residual\": " + fmt9(fit.rms_residual) +
                           ",\n  \"points\": " + std::to_string(points.size()) +
                           ",\n  \"provenance\": {\"toolkit_version\": \"" +
                           prov.version + "\", \"config_hash\": \"" +
                           prov.hash_hex() + "\"}\n}\n";
        write_text_file(out_path(cfg, "kappa_sc_fit.json"), json);
        std::printf("wrote %s\n", out_path(cfg, "kappa_sc_fit.json").c_str());
    }
    return 0;
}

int cmd_sweep(const GlobalOpts& g) {
    const RunConfig cfg = effective_config(g);
    const int jobs = effective_jobs(g);
    const Provenance prov = provenance_of(cfg);

    if (cfg.sweep_parameter == "emitter.delta_z_nm") {
        const auto sweep =
            position_sweep(cfg.coupling, cfg.sweep_from, cfg.sweep_to,
                           cfg.sweep_step, cfg.emitter_axis());
        const std::string name = "position_" + cfg.pol_axis;
        if (wants_csv(cfg)) {
            write_text_file(out_path(cfg, name + ".csv"),
                            position_sweep_csv(sweep, prov));
            std::printf("wrote %s\n", out_path(cfg, name + ".csv").c_str());
        }
        if (cfg.svg) {
            SvgSeries s;
            for (const auto& p : sweep.points) {
                s.x.push_back(p.delta_z_nm);
                s.y.push_back(p.eta);
            }
            std::vector<SvgMarker> markers;
            for (double z : sweep.maxima_nm) {
                EmitterPlacement pl;
                pl.delta_z_nm = z;
                pl.pol_axis = cfg.emitter_axis();
                markers.push_back({z, eta_of_position(pl, cfg.coupling), "max"});
            }
            write_text_file(out_path(cfg, name + ".svg"),
                            line_plot_svg("channeling efficiency vs position",
                                          "delta_z [nm]", "eta", {s}, markers));
            std::printf("wrote %s\n", out_path(cfg, name + ".svg").c_str());
        }
        std::printf("%zu points, %zu maxima\n", sweep.points.size(),
                    sweep.maxima_nm.size());
        return 0;
    }

    const SweepResult result = run_sweep(cfg, jobs);
    if (wants_csv(cfg)) {
        write_text_file(out_path(cfg, "sweep.csv"), sweep_csv(result, prov));
        std::printf("wrote %s\n", out_path(cfg, "sweep.csv").c_str());
    }
    if (wants_json(cfg)) {
        write_text_file(out_path(cfg, "sweep.json"), sweep_json(result, prov));
        std::printf("wrote %s\n", out_path(cfg, "sweep.json").c_str());
    }
    if (cfg.svg && !result.rows.empty()) {
        SvgSeries t0s, etas;
        for (const auto& r : result.rows) {
            if (!r.error.empty()) continue;
            t0s.x.push_back(r.parameter_value);
            t0s.y.push_back(r.t0);
            etas.x.push_back(r.parameter_value);
            etas.y.push_back(r.eta_cav_est);
        }
        write_text_file(out_path(cfg, "sweep.svg"),
                        line_plot_svg("sweep: " + result.parameter,
                                      result.parameter, "T0 / eta estimate",
                                      {t0s, etas}));
        std::printf("wrote %s\n", out_path(cfg, "sweep.svg").c_str());
    }
    size_t failures = 0;
    for (const auto& r : result.rows) {
        if (!r.error.empty()) ++failures;
    }
    std::printf("%zu points, %zu failed\n", result.rows.size(), failures);
    return 0;
}

int cmd_reproduce_paper(const GlobalOpts& g) {
    const RunConfig cfg = effective_config(g);
    const int jobs = effective_jobs(g);
    const PaperReport report = reproduce_paper(cfg, jobs);
    const Provenance prov = provenance_of(cfg);

    const std::string table = report_table(report);
    std::fputs(table.c_str(), stdout);
    if (wants_csv(cfg)) {
        write_text_file(out_path(cfg, "report.txt"), prov.csv_comment() + table);
        std::printf("wrote %s\n", out_path(cfg, "report.txt").c_str());
    }
    if (wants_json(cfg)) {
        write_text_file(out_path(cfg, "report.json"), report_json(report, prov));
        std::printf("wrote %s\n", out_path(cfg, "report.json").c_str());
    }
    return report.all_pass ? 0 : kExitCompare;
}

struct TwoColumn {
    std::vector<double> x, y, y2;
    bool has_y2 = false;
};

TwoColumn read_csv_columns(const std::string& path, size_t col_x, size_t col_y,
                           int col_y2 = -1) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    TwoColumn out;
    std::string line;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_skipped) {
            header_skipped = true; // header row
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() <= std::max(col_x, col_y)) continue;
        try {
            const double x = std::stod(cells[col_x]);
            const double y = std::stod(cells[col_y]);
            out.x.push_back(x);
            out.y.push_back(y);
            if (col_y2 >= 0 && cells.size() > static_cast<size_t>(col_y2)) {
                out.y2.push_back(std::stod(cells[static_cast<size_t>(col_y2)]));
                out.has_y2 = true;
            }
        } catch (const std::exception&) {
            throw IoError("malformed CSV row in " + path + ": " + line);
        }
    }
    return out;
}

int cmd_plot(const GlobalOpts& g, const std::string& kind,
             const std::string& input) {
    const RunConfig cfg = effective_config(g);
    std::string svg;
    if (kind == "spectrum") {
        const TwoColumn d = read_csv_columns(input, 0, 1, 2);
        if (d.x.empty()) throw IoError("empty result: " + input);
        SvgSeries t{d.x, d.y};
        std::vector<SvgSeries> series{t};
        if (d.has_y2) series.push_back({d.x, d.y2});
        svg = line_plot_svg("cavity spectrum", "wavelength [nm]", "T / R",
                            series);
    } else if (kind == "position") {
        const TwoColumn d = read_csv_columns(input, 0, 1);
        if (d.x.empty()) throw IoError("empty result: " + input);
        std::vector<SvgMarker> markers;
        for (size_t i = 0; i < d.x.size(); ++i) {
            const bool left_ok = i == 0 ? (d.x.size() > 1 && d.y[i] > d.y[i + 1])
                                        : d.y[i] > d.y[i - 1];
            const bool right_ok = i + 1 < d.x.size() && d.y[i] > d.y[i + 1];
            if (left_ok && right_ok) markers.push_back({d.x[i], d.y[i], "max"});
        }
        svg = line_plot_svg("channeling efficiency vs position", "delta_z [nm]",
                            "eta", {{d.x, d.y}}, markers);
    } else if (kind == "sweep") {
        const TwoColumn d = read_csv_columns(input, 0, 5, 8);
        if (d.x.empty()) throw IoError("empty result: " + input);
        std::vector<SvgSeries> series{{d.x, d.y}};
        if (d.has_y2) series.push_back({d.x, d.y2});
        svg = line_plot_svg("sweep", "parameter", "T0 / eta estimate", series);
    } else {
        throw IoError("unknown plot kind '" + kind + "'");
    }
    const std::string out = out_path(cfg, kind + ".svg");
    write_text_file(out, svg);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"capcav, a composite photonic-crystal capillary-cavity toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "config file path");
    app.add_option("--out", g.out_dir, "output directory (overrides config)");
    app.add_option("--jobs", g.jobs, "worker threads (default: hardware)");
    app.add_option("--format", g.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    app.add_flag("--svg", g.svg, "also write SVG plots");

    app.add_subcommand("mode-solve", "solve the fundamental guided mode");
    app.add_subcommand("spectrum", "compute the cavity T/R spectrum");
    app.add_subcommand("resonance", "locate the defect resonance");
    app.add_subcommand("figures", "full figure-of-merit pipeline");
    app.add_subcommand("fit-kappa-sc", "N-sweep scattering-rate fit");
    app.add_subcommand("sweep", "parameter sweep");
    auto* rp = app.add_subcommand("reproduce-paper",
                                  "compare toolkit output against the "
                                  "reference values");
    (void)rp;
    auto* plot = app.add_subcommand("plot", "render an SVG from a CSV");
    std::string plot_kind, plot_input;
    plot->add_option("--kind", plot_kind, "spectrum|position|sweep")->required();
    plot->add_option("--in", plot_input, "input CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand("mode-solve")) return cmd_mode_solve(g);
        if (app.got_subcommand("spectrum")) return cmd_spectrum(g);
        if (app.got_subcommand("resonance")) return cmd_resonance(g);
        if (app.got_subcommand("figures")) return cmd_figures(g);
        if (app.got_subcommand("fit-kappa-sc")) return cmd_fit_kappa_sc(g);
        if (app.got_subcommand("sweep")) return cmd_sweep(g);
        if (app.got_subcommand("reproduce-paper")) return cmd_reproduce_paper(g);
        if (app.got_subcommand("plot")) return cmd_plot(g, plot_kind, plot_input);
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) {
            if (v.line > 0) {
                std::fprintf(stderr, "config error (line %d): %s\n", v.line,
                             v.message.c_str());
            } else {
                std::fprintf(stderr, "config error: %s\n", v.message.c_str());
            }
        }
        return kExitConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitIo;
    } catch (const PhysicsError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPhysics;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPhysics;
    }
    return 0;
}

#include "capcav/qed_figures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "capcav/constants.hpp"
#include "capcav/errors.hpp"

namespace capcav {

namespace {

std::vector<int> default_n_sweep() {
    std::vector<int> n;
    for (int v = 200; v <= 500; v += 50) n.push_back(v);
    return n;
}

double model_residual(const std::vector<MirrorScanPoint>& points, double s) {
    double sum = 0.0;
    for (const auto& p : points) {
        const double x = s / p.kappa_ghz;
        const double et = p.t0 - (1.0 - x) * (1.0 - x);
        const double er = p.r0 - x * x;
        sum += et * et + er * er;
    }
    return sum;
}

} // namespace

void LinewidthMeasurement::validate() const {
    if (!(delta_lambda_nm > 0.0) || !(delta_lambda_nm < lambda_res_nm)) {
        throw DomainError("linewidth must satisfy 0 < delta_lambda < lambda_res");
    }
}

void EmitterSpec::validate() const {
    if (!(gamma_ghz > 0.0)) throw DomainError("gamma must be positive");
    if (!(beta0 >= 0.0 && beta0 <= 1.0)) {
        throw DomainError("beta0 must be in [0,1]");
    }
}

double kappa_from_linewidth(const LinewidthMeasurement& m) {
    m.validate();
    // c * dl / l^2 with lengths in nm gives GHz directly.
    return kSpeedOfLight * m.delta_lambda_nm /
           (m.lambda_res_nm * m.lambda_res_nm);
}

double quality_factor(const LinewidthMeasurement& m) {
    m.validate();
    return m.lambda_res_nm / m.delta_lambda_nm;
}

std::pair<double, double> on_resonance_TR(double kappa_ghz,
                                          double kappa_sc_ghz) {
    if (!(kappa_ghz > 0.0)) throw DomainError("kappa must be positive");
    if (kappa_sc_ghz < 0.0 || kappa_sc_ghz > kappa_ghz) {
        throw DomainError("kappa_sc must lie in [0, kappa]");
    }
    const double x = kappa_sc_ghz / kappa_ghz;
    return {(1.0 - x) * (1.0 - x), x * x};
}

KappaScFit fit_kappa_sc(const std::vector<MirrorScanPoint>& points) {
    if (points.empty()) throw DomainError("empty input");
    if (points.size() < 3) throw DomainError("need at least 3 scan points");
    double kappa_min = std::numeric_limits<double>::infinity();
    bool all_zero = true;
    for (size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].kappa_ghz > 0.0)) {
            throw DomainError("scan point with non-positive kappa");
        }
        kappa_min = std::min(kappa_min, points[i].kappa_ghz);
        if (points[i].t0 != 0.0 || points[i].r0 != 0.0) all_zero = false;
        for (size_t j = i + 1; j < points.size(); ++j) {
            if (points[i].kappa_ghz == points[j].kappa_ghz) {
                throw DomainError("scan points must have distinct kappa");
            }
        }
    }
    if (all_zero) throw DomainError("all-zero scan points");

    // Coarse grid then golden-section refinement; absolute tol 1e-4 GHz.
    const int n_grid = 400;
    double best_s = 0.0, best_f = model_residual(points, 0.0);
    for (int i = 1; i <= n_grid; ++i) {
        const double s = kappa_min * i / n_grid;
        const double f = model_residual(points, s);
        if (f < best_f) {
            best_f = f;
            best_s = s;
        }
    }
    double lo = std::max(0.0, best_s - kappa_min / n_grid);
    double hi = std::min(kappa_min, best_s + kappa_min / n_grid);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = model_residual(points, x1), f2 = model_residual(points, x2);
    while (hi - lo > 1e-4) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = model_residual(points, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = model_residual(points, x2);
        }
    }
    KappaScFit fit;
    fit.kappa_sc_ghz = 0.5 * (lo + hi);
    fit.rms_residual = std::sqrt(model_residual(points, fit.kappa_sc_ghz) /
                                 (2.0 * points.size()));
    return fit;
}

double finesse(double l_eff_um, double kappa_ghz) {
    if (!(l_eff_um > 0.0) || !(kappa_ghz > 0.0)) {
        throw DomainError("finesse requires positive l_eff and kappa");
    }
    return kSpeedOfLight / (2.0 * l_eff_um * 1e-6 * kappa_ghz * 1e9);
}

double scattering_q(double lambda_res_nm, double kappa_sc_ghz) {
    if (!(lambda_res_nm > 0.0) || !(kappa_sc_ghz > 0.0)) {
        throw DomainError("scattering_q requires positive inputs");
    }
    const double nu_ghz = kSpeedOfLight / lambda_res_nm; // nm -> GHz
    return nu_ghz / kappa_sc_ghz;
}

double one_pass_loss(double finesse_sc) {
    if (!(finesse_sc > 0.0)) throw DomainError("finesse_sc must be positive");
    return kPi / finesse_sc;
}

double rabi_from_purcell(double purcell_factor, double kappa_ghz,
                         double gamma_ghz) {
    if (!(purcell_factor > 0.0) || !(kappa_ghz > 0.0) || !(gamma_ghz > 0.0)) {
        throw DomainError("rabi_from_purcell requires positive inputs");
    }
    return std::sqrt(purcell_factor * kappa_ghz * gamma_ghz);
}

double purcell(double two_g0_ghz, double kappa_ghz, double gamma_ghz) {
    if (two_g0_ghz < 0.0 || !(kappa_ghz > 0.0) || !(gamma_ghz > 0.0)) {
        throw DomainError("purcell requires positive kappa and gamma");
    }
    return two_g0_ghz * two_g0_ghz / (kappa_ghz * gamma_ghz);
}

double cavity_enhanced_eta(double purcell_factor, double beta0) {
    if (purcell_factor < 0.0) throw DomainError("purcell factor must be >= 0");
    if (!(beta0 >= 0.0 && beta0 <= 1.0)) {
        throw DomainError("beta0 must be in [0,1]");
    }
    const double denom = 1.0 - beta0 + purcell_factor * beta0;
    if (denom <= 0.0) return 1.0;
    return std::clamp(purcell_factor * beta0 / denom, 0.0, 1.0);
}

double channeling_efficiency(double p_coupled, double p_total) {
    if (!(p_total > 0.0)) throw DomainError("total power must be positive");
    if (p_coupled < 0.0 || p_coupled > p_total) {
        throw DomainError("coupled power must lie in [0, total]");
    }
    return p_coupled / p_total;
}

std::vector<MirrorScanPoint> mirror_scan_points(const GratingCavitySpec& spec,
                                                const FigureSetOptions& options,
                                                int jobs) {
    const std::vector<int> sweep =
        options.n_sweep.empty() ? default_n_sweep() : options.n_sweep;
    std::vector<MirrorScanPoint> points(sweep.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= sweep.size()) return;
            GratingCavitySpec s = spec;
            s.slat_count = sweep[i];
            try {
                const auto scan = resonance_scan(s, options.grid, {}, 1);
                LinewidthMeasurement m{scan.report.lambda_res_nm,
                                       scan.report.fwhm_nm, spec.polarization};
                points[i] = {sweep[i], kappa_from_linewidth(m), scan.report.t0,
                             scan.report.r0};
            } catch (const PhysicsError&) {
                points[i] = {sweep[i], 0.0, 0.0, 0.0}; // dropped below
            }
        }
    };
    const int n_threads = std::max(
        1, std::min<int>(std::max(jobs, options.jobs), static_cast<int>(sweep.size())));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    // Per-point resonance failures are dropped; the fit validates the count.
    std::erase_if(points,
                  [](const MirrorScanPoint& p) { return p.kappa_ghz <= 0.0; });
    return points;
}

QedFigureSet figure_set(const GratingCavitySpec& spec,
                        const EmitterSpec& emitter,
                        const LinewidthMeasurement& measurement,
                        double purcell_factor,
                        const FigureSetOptions& options) {
    spec.validate();
    emitter.validate();
    measurement.validate();

    QedFigureSet out;
    out.kappa_ghz = kappa_from_linewidth(measurement);
    out.q = quality_factor(measurement);
    out.purcell = purcell_factor;
    out.cooperativity = purcell_factor;

    // Effective length from the cavity's own resonance.
    const int jobs = std::max(1, options.jobs);
    const auto scan = resonance_scan(spec, options.grid, {}, jobs);
    const auto envelope =
        intracavity_envelope(spec, scan.report.lambda_res_nm);
    out.l_eff_um = effective_length(envelope).l_eff_nm * 1e-3;

    // Scattering rate from the N-sweep fit.
    const auto points = mirror_scan_points(spec, options, jobs);
    out.kappa_sc_ghz = fit_kappa_sc(points).kappa_sc_ghz;

    out.finesse = finesse(out.l_eff_um, out.kappa_ghz);
    if (out.kappa_sc_ghz > 0.0) {
        out.finesse_sc = finesse(out.l_eff_um, out.kappa_sc_ghz);
        out.one_pass_loss = one_pass_loss(out.finesse_sc);
        out.q_sc = scattering_q(measurement.lambda_res_nm, out.kappa_sc_ghz);
    } else {
        out.finesse_sc = std::numeric_limits<double>::infinity();
        out.one_pass_loss = 0.0;
        out.q_sc = std::numeric_limits<double>::infinity();
    }
    out.two_g0_ghz =
        rabi_from_purcell(purcell_factor, out.kappa_ghz, emitter.gamma_ghz);
    out.eta_cav = cavity_enhanced_eta(purcell_factor, emitter.beta0);
    return out;
}

} // namespace capcav

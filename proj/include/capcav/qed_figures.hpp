#pragma once

#include <utility>
#include <vector>

#include "capcav/grating_cavity.hpp"

namespace capcav {

// A resonance linewidth reading: lambda_res and FWHM, nm.
struct LinewidthMeasurement {
    double lambda_res_nm = 619.0;
    double delta_lambda_nm = 0.248;
    Polarization polarization = Polarization::Y;

    void validate() const;
};

// One N-sweep sample: total decay rate plus on-resonance T/R.
struct MirrorScanPoint {
    int slat_count = 0;
    double kappa_ghz = 0.0;
    double t0 = 0.0;
    double r0 = 0.0;
};

struct EmitterSpec {
    double gamma_ghz = 1.2;       // spontaneous decay rate
    double lambda_emit_nm = 619.0;
    double beta0 = 0.52;          // single-pass channeling efficiency

    void validate() const;
};

// Every closed-form cavity figure in one record. Rates are ordinary
// frequencies in GHz throughout.
struct QedFigureSet {
    double kappa_ghz = 0.0;
    double kappa_sc_ghz = 0.0;
    double q = 0.0;
    double q_sc = 0.0;
    double finesse = 0.0;
    double finesse_sc = 0.0;
    double one_pass_loss = 0.0;
    double purcell = 0.0;
    double cooperativity = 0.0; // equals purcell in the Purcell regime
    double two_g0_ghz = 0.0;
    double eta_cav = 0.0;
    double l_eff_um = 0.0;
};

// kappa = c * delta_lambda / lambda_res^2, GHz.
double kappa_from_linewidth(const LinewidthMeasurement& m);

// Q = lambda_res / delta_lambda.
double quality_factor(const LinewidthMeasurement& m);

// T0 = |1 - kappa_sc/kappa|^2, R0 = |kappa_sc/kappa|^2.
// Requires 0 <= kappa_sc <= kappa.
std::pair<double, double> on_resonance_TR(double kappa_ghz,
                                          double kappa_sc_ghz);

struct KappaScFit {
    double kappa_sc_ghz = 0.0;
    double rms_residual = 0.0;
};

// Least-squares fit of the symmetric-cavity on-resonance model over the scan
// points, kappa_sc the single free parameter on [0, min kappa].
KappaScFit fit_kappa_sc(const std::vector<MirrorScanPoint>& points);

// F = c / (2 l_eff kappa).
double finesse(double l_eff_um, double kappa_ghz);

// Q_sc = (c / lambda_res) / kappa_sc.
double scattering_q(double lambda_res_nm, double kappa_sc_ghz);

// L = pi / F_sc.
double one_pass_loss(double finesse_sc);

// 2 g0 = sqrt(F_P kappa gamma).
double rabi_from_purcell(double purcell_factor, double kappa_ghz,
                         double gamma_ghz);

// F_P = (2 g0)^2 / (kappa gamma).
double purcell(double two_g0_ghz, double kappa_ghz, double gamma_ghz);

// eta = F_P beta0 / (1 - beta0 + F_P beta0), clamped to [0, 1].
double cavity_enhanced_eta(double purcell_factor, double beta0);

// eta = P_C / P_T. Requires 0 <= P_C <= P_T, P_T > 0.
double channeling_efficiency(double p_coupled, double p_total);

struct FigureSetOptions {
    std::vector<int> n_sweep;   // defaults to 200..500 step 50
    ScanGrid grid;
    int jobs = 1;
};

// Resonance measurements over an N-sweep of the given cavity; the spec's own
// slat_count is replaced per point. Points may run in parallel; output is in
// sweep order.
std::vector<MirrorScanPoint> mirror_scan_points(
    const GratingCavitySpec& spec, const FigureSetOptions& options = {},
    int jobs = 1);

// Full pipeline: linewidth figures, effective length from the intracavity
// envelope, N-sweep + kappa_sc fit, then every closed-form relation.
QedFigureSet figure_set(const GratingCavitySpec& spec,
                        const EmitterSpec& emitter,
                        const LinewidthMeasurement& measurement,
                        double purcell_factor,
                        const FigureSetOptions& options = {});

} // namespace capcav

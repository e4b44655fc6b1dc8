#pragma once

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "capcav/geometry.hpp"

namespace capcav {

// Eigen-solution of the layered fiber. layer_coefficients holds the
// amplitudes of the longitudinal field expansions, ordered
//   [0] core E_z        [1] core H_z
//   [2] shell E_z (J/I) [3] shell E_z (Y/K)
//   [4] shell H_z (J/I) [5] shell H_z (Y/K)
//   [6] cladding E_z    [7] cladding H_z
// H is carried impedance-normalized (Z0*H), so the axial Poynting density is
// 0.5*Re(E_r*conj(H_phi) - E_phi*conj(H_r)) without further constants.
// Coefficients are scaled so the axial power flux over the cross-section is 1.
struct GuidedMode {
    double wavelength_nm = 0.0;
    double n_eff = 0.0;
    double beta_rad_per_m = 0.0;
    int azimuthal_order = 1;
    std::array<std::complex<double>, 8> layer_coefficients{};
};

// Six cylindrical field components at one point, e^{i m phi} included.
struct FieldComponents {
    std::complex<double> e_r, e_phi, e_z;
    std::complex<double> h_r, h_phi, h_z;
};

struct ModeSolverOptions {
    double scan_step = 1e-4;      // n_eff scan resolution
    double bisection_tol = 1e-9;  // |delta n_eff| stop criterion
    double edge_margin = 1e-6;    // keep-out from interval ends and layer indices
};

// Determinant of the 8x8 boundary-condition matrix (4x4 in the d_in = 0
// two-layer limit) enforcing continuity of E_z, H_z, E_phi, H_phi at both
// interfaces. Rows are normalized by their largest-magnitude entry, so the
// value stays representable; sign changes in n_eff_trial locate eigenvalues.
double dispersion_determinant(const LayeredFiberGeometry& geom,
                              double wavelength_nm,
                              double n_eff_trial,
                              int azimuthal_order);

// Scans n_eff from just below the maximum layer index down to just above the
// cladding index, brackets sign changes of the m = 1 determinant, refines by
// bisection, and returns the root with the largest n_eff (fundamental hybrid
// mode) with power-normalized layer coefficients.
// Throws NoGuidedMode / AmbiguousBracket.
GuidedMode solve_fundamental_mode(const LayeredFiberGeometry& geom,
                                  double wavelength_nm,
                                  const ModeSolverOptions& options = {});

// Field components at (r, phi) from the stored layer coefficients, using the
// correct cylinder-function branch per layer.
FieldComponents mode_field(const GuidedMode& mode,
                           const LayeredFiberGeometry& geom,
                           double r_nm,
                           double phi_rad);

struct NeffPoint {
    double d_in_nm = 0.0;
    double d_out_nm = 0.0;
    double n_eff = 0.0;
    std::string error; // empty on success
};

struct NeffCurve {
    std::vector<NeffPoint> points; // input order
    // Diagnostics over the successful points, in input order.
    bool strictly_decreasing = false;
    bool strictly_increasing = false;
};

// Independent solves per (d_in, d_out) point; per-point failures are recorded
// and the sweep continues. Points may be evaluated in parallel (jobs > 1);
// output ordering always matches input ordering.
NeffCurve neff_curve(const LayeredFiberGeometry& geom_template,
                     const std::vector<std::pair<double, double>>& sweep,
                     double wavelength_nm,
                     const ModeSolverOptions& options = {},
                     int jobs = 1);

} // namespace capcav

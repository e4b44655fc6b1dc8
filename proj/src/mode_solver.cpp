#include "capcav/mode_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "capcav/bessel.hpp"
#include "capcav/constants.hpp"
#include "capcav/errors.hpp"

namespace capcav {

namespace {

using Complex = std::complex<double>;

// Radial behaviour of one homogeneous layer at fixed (lambda, n_eff).
// kappa2 = k0^2 (n^2 - n_eff^2): oscillatory layers (kappa2 > 0) carry J/Y,
// evanescent layers (kappa2 < 0) carry I/K.
struct LayerBasis {
    double n = 1.0;
    double kappa2 = 0.0; // signed, 1/nm^2
    double q = 0.0;      // sqrt(|kappa2|), 1/nm
    bool oscillatory = true;

    LayerBasis() = default;
    LayerBasis(double index, double k0, double n_eff) {
        n = index;
        kappa2 = k0 * k0 * (n * n - n_eff * n_eff);
        oscillatory = kappa2 > 0.0;
        q = std::sqrt(std::abs(kappa2));
    }

    // kind 0: regular-at-origin function (J or I); kind 1: second solution
    // (Y or K, also the decaying choice in the cladding).
    double value(int kind, int m, double r) const {
        const double x = q * r;
        if (oscillatory) return kind == 0 ? bessel_j(m, x) : bessel_y(m, x);
        return kind == 0 ? bessel_i(m, x) : bessel_k(m, x);
    }

    // d/dr of value().
    double deriv(int kind, int m, double r) const {
        const double x = q * r;
        if (oscillatory) {
            return q * (kind == 0 ? bessel_j_prime(m, x) : bessel_y_prime(m, x));
        }
        return q * (kind == 0 ? bessel_i_prime(m, x) : bessel_k_prime(m, x));
    }
};

struct Layers {
    double k0 = 0.0;
    double beta = 0.0; // 1/nm
    LayerBasis core, shell, cladding;
    double a = 0.0, b = 0.0; // interface radii, nm
    bool two_layer = false;  // d_in == 0
};

Layers make_layers(const LayeredFiberGeometry& geom, double wavelength_nm,
                   double n_eff) {
    Layers L;
    L.k0 = 2.0 * kPi / wavelength_nm;
    L.beta = L.k0 * n_eff;
    L.a = 0.5 * geom.d_in_nm;
    L.b = 0.5 * geom.d_out_nm;
    L.two_layer = geom.d_in_nm <= 0.0;
    L.core = LayerBasis(refractive_index(geom.core, wavelength_nm), L.k0, n_eff);
    L.shell = LayerBasis(refractive_index(geom.shell, wavelength_nm), L.k0, n_eff);
    L.cladding =
        LayerBasis(refractive_index(geom.cladding, wavelength_nm), L.k0, n_eff);
    return L;
}

// With H_z = i h_z (h_z real) the interface conditions reduce to a real
// system. Tangential rows at radius r between an inner and an outer layer:
//   E_z  :  e_z(inner) - e_z(outer) = 0
//   H_z  :  h_z(inner) - h_z(outer) = 0
//   E_phi: -(m beta / (kappa2 r)) e_z + (k0 / kappa2) h_z'   (each side)
//   H_phi:  (k0 n^2 / kappa2) e_z' - (m beta / (kappa2 r)) h_z
// kappa2 carries its sign, which selects the evanescent branch automatically.
struct RowBuilder {
    int m;
    double beta, k0;

    double ez(const LayerBasis& L, int kind, double r) const {
        return L.value(kind, m, r);
    }
    double ephi_from_e(const LayerBasis& L, int kind, double r) const {
        return -(m * beta / (L.kappa2 * r)) * L.value(kind, m, r);
    }
    double ephi_from_h(const LayerBasis& L, int kind, double r) const {
        return (k0 / L.kappa2) * L.deriv(kind, m, r);
    }
    double hphi_from_e(const LayerBasis& L, int kind, double r) const {
        return (k0 * L.n * L.n / L.kappa2) * L.deriv(kind, m, r);
    }
    double hphi_from_h(const LayerBasis& L, int kind, double r) const {
        return -(m * beta / (L.kappa2 * r)) * L.value(kind, m, r);
    }
};

// Columns: [core e, core h, shell e0, shell e1, shell h0, shell h1,
//           clad e, clad h]. The two-layer limit keeps the 4x4 block
// [shell e0, shell h0, clad e, clad h] (regular-at-origin shell only).
Eigen::MatrixXd boundary_matrix(const Layers& L, int m) {
    const RowBuilder rb{m, L.beta, L.k0};
    if (L.two_layer) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 4);
        const double r = L.b;
        // E_z
        M(0, 0) = rb.ez(L.shell, 0, r);
        M(0, 2) = -rb.ez(L.cladding, 1, r);
        // H_z
        M(1, 1) = rb.ez(L.shell, 0, r);
        M(1, 3) = -rb.ez(L.cladding, 1, r);
        // E_phi
        M(2, 0) = rb.ephi_from_e(L.shell, 0, r);
        M(2, 1) = rb.ephi_from_h(L.shell, 0, r);
        M(2, 2) = -rb.ephi_from_e(L.cladding, 1, r);
        M(2, 3) = -rb.ephi_from_h(L.cladding, 1, r);
        // H_phi
        M(3, 0) = rb.hphi_from_e(L.shell, 0, r);
        M(3, 1) = rb.hphi_from_h(L.shell, 0, r);
        M(3, 2) = -rb.hphi_from_e(L.cladding, 1, r);
        M(3, 3) = -rb.hphi_from_h(L.cladding, 1, r);
        return M;
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(8, 8);
    const double a = L.a, b = L.b;
    // Inner interface r = a: core (regular kind 0) vs shell (kinds 0, 1).
    M(0, 0) = rb.ez(L.core, 0, a);
    M(0, 2) = -rb.ez(L.shell, 0, a);
    M(0, 3) = -rb.ez(L.shell, 1, a);

    M(1, 1) = rb.ez(L.core, 0, a);
    M(1, 4) = -rb.ez(L.shell, 0, a);
    M(1, 5) = -rb.ez(L.shell, 1, a);

    M(2, 0) = rb.ephi_from_e(L.core, 0, a);
    M(2, 1) = rb.ephi_from_h(L.core, 0, a);
    M(2, 2) = -rb.ephi_from_e(L.shell, 0, a);
    M(2, 3) = -rb.ephi_from_e(L.shell, 1, a);
    M(2, 4) = -rb.ephi_from_h(L.shell, 0, a);
    M(2, 5) = -rb.ephi_from_h(L.shell, 1, a);

    M(3, 0) = rb.hphi_from_e(L.core, 0, a);
    M(3, 1) = rb.hphi_from_h(L.core, 0, a);
    M(3, 2) = -rb.hphi_from_e(L.shell, 0, a);
    M(3, 3) = -rb.hphi_from_e(L.shell, 1, a);
    M(3, 4) = -rb.hphi_from_h(L.shell, 0, a);
    M(3, 5) = -rb.hphi_from_h(L.shell, 1, a);

    // Outer interface r = b: shell vs cladding (decaying kind 1).
    M(4, 2) = rb.ez(L.shell, 0, b);
    M(4, 3) = rb.ez(L.shell, 1, b);
    M(4, 6) = -rb.ez(L.cladding, 1, b);

    M(5, 4) = rb.ez(L.shell, 0, b);
    M(5, 5) = rb.ez(L.shell, 1, b);
    M(5, 7) = -rb.ez(L.cladding, 1, b);

    M(6, 2) = rb.ephi_from_e(L.shell, 0, b);
    M(6, 3) = rb.ephi_from_e(L.shell, 1, b);
    M(6, 4) = rb.ephi_from_h(L.shell, 0, b);
    M(6, 5) = rb.ephi_from_h(L.shell, 1, b);
    M(6, 6) = -rb.ephi_from_e(L.cladding, 1, b);
    M(6, 7) = -rb.ephi_from_h(L.cladding, 1, b);

    M(7, 2) = rb.hphi_from_e(L.shell, 0, b);
    M(7, 3) = rb.hphi_from_e(L.shell, 1, b);
    M(7, 4) = rb.hphi_from_h(L.shell, 0, b);
    M(7, 5) = rb.hphi_from_h(L.shell, 1, b);
    M(7, 6) = -rb.hphi_from_e(L.cladding, 1, b);
    M(7, 7) = -rb.hphi_from_h(L.cladding, 1, b);
    return M;
}

// Modified cylinder functions grow fast enough to overflow a raw determinant;
// normalizing each row by its largest-magnitude entry keeps the value tame
// without moving the roots (the scale factors are positive).
void normalize_rows(Eigen::MatrixXd& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        const double s = M.row(i).cwiseAbs().maxCoeff();
        if (s > 0.0) M.row(i) /= s;
    }
}

double scaled_determinant(const LayeredFiberGeometry& geom, double wavelength_nm,
                          double n_eff, int m) {
    Layers L = make_layers(geom, wavelength_nm, n_eff);
    Eigen::MatrixXd M = boundary_matrix(L, m);
    normalize_rows(M);
    return M.determinant();
}

struct ScanInterval {
    double lo, hi;
};

// The scan interval (n_clad, n_max) split at interior layer indices, where
// kappa2 of some layer crosses zero and the determinant degenerates.
std::vector<ScanInterval> scan_intervals(const LayeredFiberGeometry& geom,
                                         double wavelength_nm, double margin) {
    const double n_clad = refractive_index(geom.cladding, wavelength_nm);
    const double n_core = refractive_index(geom.core, wavelength_nm);
    const double n_shell = refractive_index(geom.shell, wavelength_nm);
    const double n_max = std::max({n_core, n_shell, n_clad});

    std::vector<double> cuts;
    for (double n : {n_core, n_shell}) {
        if (n > n_clad + margin && n < n_max - margin) cuts.push_back(n);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<ScanInterval> out;
    double lo = n_clad + margin;
    const double hi = n_max - margin;
    if (lo >= hi) return out;
    const double cut_margin = 1e-7;
    for (double c : cuts) {
        if (c - cut_margin > lo) out.push_back({lo, c - cut_margin});
        lo = c + cut_margin;
    }
    if (hi > lo) out.push_back({lo, hi});
    return out;
}

struct Bracket {
    double lo, hi; // f(lo) and f(hi) have opposite signs
};

double bisect_root(const LayeredFiberGeometry& geom, double wavelength_nm, int m,
                   Bracket br, double f_lo, double tol) {
    double lo = br.lo, hi = br.hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid =
            scaled_determinant(geom, wavelength_nm, mid, m);
        if (f_mid == 0.0) return mid;
        if ((f_lo < 0.0) != (f_mid < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Counts sign changes of the determinant over a refined grid inside one
// bracket; more than one means two roots share a scan step.
int sign_changes_within(const LayeredFiberGeometry& geom, double wavelength_nm,
                        int m, Bracket br, int subdivisions) {
    int changes = 0;
    double prev = scaled_determinant(geom, wavelength_nm, br.lo, m);
    for (int i = 1; i <= subdivisions; ++i) {
        const double x = br.lo + (br.hi - br.lo) * i / subdivisions;
        const double f = scaled_determinant(geom, wavelength_nm, x, m);
        if (prev != 0.0 && f != 0.0 && (prev < 0.0) != (f < 0.0)) ++changes;
        prev = f;
    }
    return changes;
}

// Highest-n_eff root of the m = 1 determinant, or NaN when none exists.
double find_fundamental_root(const LayeredFiberGeometry& geom,
                             double wavelength_nm,
                             const ModeSolverOptions& opt) {
    const int m = 1;
    auto intervals = scan_intervals(geom, wavelength_nm, opt.edge_margin);
    // Scan from the top of the index range downward.
    for (auto it = intervals.rbegin(); it != intervals.rend(); ++it) {
        const double span = it->hi - it->lo;
        const int steps = std::max(2, static_cast<int>(std::ceil(span / opt.scan_step)));
        double x_hi = it->hi;
        double f_hi = scaled_determinant(geom, wavelength_nm, x_hi, m);
        for (int i = 1; i <= steps; ++i) {
            const double x_lo = it->hi - span * i / steps;
            const double f_lo = scaled_determinant(geom, wavelength_nm, x_lo, m);
            const bool crossing =
                (f_lo == 0.0) || (f_hi != 0.0 && (f_lo < 0.0) != (f_hi < 0.0));
            if (crossing) {
                Bracket br{x_lo, x_hi};
                if (sign_changes_within(geom, wavelength_nm, m, br, 8) > 1) {
                    throw AmbiguousBracket(
                        "two dispersion roots inside one scan step near n_eff = " +
                        std::to_string(0.5 * (x_lo + x_hi)) +
                        "; refine scan_step");
                }
                // Interface-continuity of the extracted field coefficients
                // tracks the root accuracy, so refine past the requested
                // tolerance down to near machine resolution.
                const double tol = std::min(opt.bisection_tol, 1e-13);
                return bisect_root(geom, wavelength_nm, m, br, f_lo, tol);
            }
            x_hi = x_lo;
            f_hi = f_lo;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Null-space vector of the boundary matrix at the eigenvalue, expanded to the
// fixed 8-slot coefficient layout.
std::array<double, 8> null_space_coefficients(const Layers& L, int m) {
    Eigen::MatrixXd M = boundary_matrix(L, m);
    normalize_rows(M);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    Eigen::VectorXd v = svd.matrixV().col(M.cols() - 1);
    // Deterministic overall sign: largest-magnitude entry positive.
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;

    std::array<double, 8> c{};
    if (L.two_layer) {
        c[2] = v(0); // shell E_z, regular kind
        c[4] = v(1); // shell H_z, regular kind
        c[6] = v(2); // cladding E_z
        c[7] = v(3); // cladding H_z
    } else {
        for (int i = 0; i < 8; ++i) c[i] = v(i);
    }
    return c;
}

struct LayerAt {
    const LayerBasis* basis;
    // Coefficient slots for (E kind0, E kind1, H kind0, H kind1); -1 = unused.
    int e0, e1, h0, h1;
};

LayerAt layer_at(const Layers& L, double r) {
    if (!L.two_layer && r < L.a) return {&L.core, 0, -1, 1, -1};
    if (r < L.b) return {&L.shell, 2, 3, 4, 5};
    return {&L.cladding, -1, 6, -1, 7};
}

FieldComponents evaluate_fields(const Layers& L, int m,
                                const std::array<Complex, 8>& c, double r,
                                double phi) {
    const LayerAt at = layer_at(L, r);
    const LayerBasis& B = *at.basis;
    const double rr = std::max(r, 1e-6); // keep 1/r finite on the axis

    auto pick = [&](int slot) -> Complex {
        return slot >= 0 ? c[static_cast<size_t>(slot)] : Complex(0.0, 0.0);
    };

    Complex ez(0.0), dez(0.0), hz(0.0), dhz(0.0);
    const int kinds[2] = {0, 1};
    const int eslots[2] = {at.e0, at.e1};
    const int hslots[2] = {at.h0, at.h1};
    for (int k = 0; k < 2; ++k) {
        if (eslots[k] >= 0) {
            ez += pick(eslots[k]) * B.value(kinds[k], m, rr);
            dez += pick(eslots[k]) * B.deriv(kinds[k], m, rr);
        }
        if (hslots[k] >= 0) {
            hz += pick(hslots[k]) * B.value(kinds[k], m, rr);
            dhz += pick(hslots[k]) * B.deriv(kinds[k], m, rr);
        }
    }

    const Complex i_unit(0.0, 1.0);
    const double kap2 = B.kappa2;
    const double beta = L.beta, k0 = L.k0, n2 = B.n * B.n;

    FieldComponents f;
    f.e_z = ez;
    f.h_z = hz;
    f.e_r = (i_unit / kap2) * (beta * dez + i_unit * (k0 * m / rr) * hz);
    f.e_phi = (i_unit / kap2) * (i_unit * (m * beta / rr) * ez - k0 * dhz);
    f.h_r = (i_unit / kap2) * (beta * dhz - i_unit * (k0 * n2 * m / rr) * ez);
    f.h_phi = (i_unit / kap2) * (i_unit * (m * beta / rr) * hz + k0 * n2 * dez);

    const Complex az = std::exp(i_unit * (m * phi));
    f.e_r *= az;
    f.e_phi *= az;
    f.e_z *= az;
    f.h_r *= az;
    f.h_phi *= az;
    f.h_z *= az;
    return f;
}

double axial_poynting(const Layers& L, int m, const std::array<Complex, 8>& c,
                      double r) {
    const FieldComponents f = evaluate_fields(L, m, c, r, 0.0);
    return 0.5 * std::real(f.e_r * std::conj(f.h_phi) -
                           f.e_phi * std::conj(f.h_r));
}

// Composite-Simpson integral of S_z(r) r dr over [lo, hi].
double simpson_flux(const Layers& L, int m, const std::array<Complex, 8>& c,
                    double lo, double hi, int panels) {
    if (hi <= lo) return 0.0;
    const int n = 2 * panels;
    const double h = (hi - lo) / n;
    auto g = [&](double r) { return axial_poynting(L, m, c, r) * r; };
    double sum = g(lo) + g(hi);
    for (int i = 1; i < n; ++i) sum += g(lo + i * h) * ((i & 1) ? 4.0 : 2.0);
    return sum * h / 3.0;
}

double total_axial_power(const Layers& L, int m,
                         const std::array<Complex, 8>& c) {
    // Cladding tail: K_m falls like e^{-q r}, so 45 decay lengths suffice.
    const double q_clad = std::max(L.cladding.q, 1e-5);
    const double r_end = L.b + std::min(45.0 / q_clad, 5.0e6);
    double p = 0.0;
    if (!L.two_layer) p += simpson_flux(L, m, c, 0.0, L.a, 256);
    p += simpson_flux(L, m, c, L.two_layer ? 0.0 : L.a, L.b, 512);
    p += simpson_flux(L, m, c, L.b, r_end, 1024);
    return 2.0 * kPi * p;
}

} // namespace

double dispersion_determinant(const LayeredFiberGeometry& geom,
                              double wavelength_nm, double n_eff_trial,
                              int azimuthal_order) {
    geom.validate();
    const double n_clad = refractive_index(geom.cladding, wavelength_nm);
    const double n_max =
        std::max({refractive_index(geom.core, wavelength_nm),
                  refractive_index(geom.shell, wavelength_nm), n_clad});
    if (!(n_eff_trial > n_clad) || !(n_eff_trial < n_max)) {
        throw DomainError("n_eff_trial must lie in (n_cladding, max layer index)");
    }
    for (const auto* mat : {&geom.core, &geom.shell, &geom.cladding}) {
        if (n_eff_trial == refractive_index(*mat, wavelength_nm)) {
            throw DomainError("n_eff_trial coincides with a layer index");
        }
    }
    return scaled_determinant(geom, wavelength_nm, n_eff_trial, azimuthal_order);
}

GuidedMode solve_fundamental_mode(const LayeredFiberGeometry& geom,
                                  double wavelength_nm,
                                  const ModeSolverOptions& options) {
    geom.validate();
    const double n_clad = refractive_index(geom.cladding, wavelength_nm);
    const double n_shell = refractive_index(geom.shell, wavelength_nm);
    if (!(n_shell > n_clad)) {
        throw NoGuidedMode("shell index must exceed cladding index");
    }

    const double root = find_fundamental_root(geom, wavelength_nm, options);
    if (!std::isfinite(root)) {
        throw NoGuidedMode("no dispersion sign change: fiber below cutoff");
    }

    Layers L = make_layers(geom, wavelength_nm, root);
    const int m = 1;
    const std::array<double, 8> raw = null_space_coefficients(L, m);

    GuidedMode mode;
    mode.wavelength_nm = wavelength_nm;
    mode.n_eff = root;
    mode.beta_rad_per_m = 2.0 * kPi * root / (wavelength_nm * 1e-9);
    mode.azimuthal_order = m;
    // E_z slots are real; H_z slots carry the i of the reduced system.
    const Complex i_unit(0.0, 1.0);
    for (int s : {0, 2, 3, 6}) mode.layer_coefficients[s] = raw[s];
    for (int s : {1, 4, 5, 7}) mode.layer_coefficients[s] = i_unit * raw[s];

    const double power = total_axial_power(L, m, mode.layer_coefficients);
    if (!(power > 0.0) || !std::isfinite(power)) {
        throw NoGuidedMode("mode power normalization failed");
    }
    const double scale = 1.0 / std::sqrt(power);
    for (auto& coeff : mode.layer_coefficients) coeff *= scale;
    return mode;
}

FieldComponents mode_field(const GuidedMode& mode,
                           const LayeredFiberGeometry& geom, double r_nm,
                           double phi_rad) {
    if (r_nm < 0.0) throw DomainError("radius must be non-negative");
    Layers L = make_layers(geom, mode.wavelength_nm, mode.n_eff);
    return evaluate_fields(L, mode.azimuthal_order, mode.layer_coefficients,
                           r_nm, phi_rad);
}

NeffCurve neff_curve(const LayeredFiberGeometry& geom_template,
                     const std::vector<std::pair<double, double>>& sweep,
                     double wavelength_nm, const ModeSolverOptions& options,
                     int jobs) {
    NeffCurve curve;
    curve.points.resize(sweep.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= sweep.size()) return;
            NeffPoint& pt = curve.points[i];
            pt.d_in_nm = sweep[i].first;
            pt.d_out_nm = sweep[i].second;
            LayeredFiberGeometry geom = geom_template;
            geom.d_in_nm = pt.d_in_nm;
            geom.d_out_nm = pt.d_out_nm;
            try {
                pt.n_eff = solve_fundamental_mode(geom, wavelength_nm, options).n_eff;
            } catch (const Error& e) {
                pt.error = e.what();
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(sweep.size())));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<double> ok;
    for (const auto& pt : curve.points) {
        if (pt.error.empty()) ok.push_back(pt.n_eff);
    }
    curve.strictly_decreasing = ok.size() >= 2;
    curve.strictly_increasing = ok.size() >= 2;
    for (size_t i = 1; i < ok.size(); ++i) {
        if (!(ok[i] < ok[i - 1])) curve.strictly_decreasing = false;
        if (!(ok[i] > ok[i - 1])) curve.strictly_increasing = false;
    }
    return curve;
}

} // namespace capcav

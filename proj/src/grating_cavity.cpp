#include "capcav/grating_cavity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "capcav/constants.hpp"
#include "capcav/errors.hpp"
#include "capcav/qed_figures.hpp"

namespace capcav {

namespace {

using Complex = std::complex<double>;

constexpr Complex kI{0.0, 1.0};

Mat2c mat_mul(const Mat2c& a, const Mat2c& b) {
    Mat2c r;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    return r;
}

Mat2c identity_mat() {
    return Mat2c{{{Complex(1.0), Complex(0.0)}, {Complex(0.0), Complex(1.0)}}};
}

struct Segment {
    double n;
    double length_nm;
    double loss_amp;
};

// Stack layout, front to back: N/2 periods of [gap, slat], the defect gap,
// then N/2 periods of [slat, gap]. Ambient index equals the gap index, so
// the outer gaps add only propagation phase.
std::vector<Segment> build_stack(const GratingCavitySpec& spec, double base_n) {
    const double t = spec.slat_thickness_nm();
    const double gap = spec.period_nm - t;
    const double n_slat = base_n + spec.delta_n;
    const int per_side = spec.slat_count / 2;

    std::vector<Segment> segs;
    segs.reserve(static_cast<size_t>(spec.slat_count) * 2 + 1);
    for (int i = 0; i < per_side; ++i) {
        segs.push_back({n_slat, t, spec.slat_loss});
        segs.push_back({base_n, gap, 1.0});
    }
    segs.push_back({base_n, spec.defect_width_nm, 1.0});
    for (int i = 0; i < per_side; ++i) {
        segs.push_back({base_n, gap, 1.0});
        segs.push_back({n_slat, t, spec.slat_loss});
    }
    return segs;
}

Complex complex_index(double n, double length_nm, double wavelength_nm,
                      double loss_amp) {
    if (loss_amp >= 1.0 || length_nm <= 0.0) return Complex(n, 0.0);
    // exp(k_im L) = loss_amp with k_im = 2 pi n_im / lambda. The
    // characteristic-matrix extraction used here propagates front-of-stack
    // fields from back-of-stack fields, which makes absorption a negative
    // imaginary index part.
    const double n_im =
        wavelength_nm * std::log(loss_amp) / (2.0 * kPi * length_nm);
    return Complex(n, n_im);
}

struct AmplitudePair {
    Complex t, r;
};

AmplitudePair stack_amplitudes(const std::vector<Segment>& segs,
                               double ambient_n, double wavelength_nm) {
    Mat2c m = identity_mat();
    for (const auto& s : segs) {
        m = mat_mul(m, segment_matrix(s.n, s.length_nm, wavelength_nm, s.loss_amp));
    }
    const Complex n_in(ambient_n), n_out(ambient_n);
    const Complex a = m[0][0] + m[0][1] * n_out;
    const Complex b = m[1][0] + m[1][1] * n_out;
    const Complex den = n_in * a + b;
    return {2.0 * n_in / den, (n_in * a - b) / den};
}

CavitySpectrum spectrum_over(const GratingCavitySpec& spec,
                             std::vector<double> wavelengths,
                             const BaseIndexModel& base_index, int jobs) {
    spec.validate();
    if (wavelengths.empty()) throw DomainError("empty wavelength grid");

    CavitySpectrum out;
    out.wavelengths_nm = std::move(wavelengths);
    const size_t n = out.wavelengths_nm.size();
    out.t_amp.resize(n);
    out.r_amp.resize(n);
    out.transmission.resize(n);
    out.reflection.resize(n);

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            const double lambda = out.wavelengths_nm[i];
            const double base =
                base_index ? base_index(lambda) : spec.base_n_eff;
            const auto segs = build_stack(spec, base);
            const auto amp = stack_amplitudes(segs, base, lambda);
            out.t_amp[i] = amp.t;
            out.r_amp[i] = amp.r;
            out.transmission[i] = std::norm(amp.t);
            out.reflection[i] = std::norm(amp.r);
        }
    };
    const int n_threads =
        std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

double interp_crossing(double x0, double y0, double x1, double y1, double level) {
    if (y1 == y0) return x0;
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

} // namespace

void GratingCavitySpec::validate() const {
    if (!(period_nm > 0.0)) throw DomainError("grating period must be positive");
    if (!(duty_cycle > 0.0 && duty_cycle < 1.0)) {
        throw DomainError("duty_cycle must be in (0,1)");
    }
    if (slat_count < 2 || (slat_count % 2) != 0) {
        throw DomainError("slat_count must be even and at least 2");
    }
    if (!(defect_width_nm > 0.0)) {
        throw DomainError("defect width must be positive");
    }
    if (delta_n < 0.0) throw DomainError("delta_n must be non-negative");
    if (!(slat_loss > 0.0 && slat_loss <= 1.0)) {
        throw DomainError("slat_loss must be in (0,1]");
    }
    if (!(base_n_eff > 0.0)) throw DomainError("base_n_eff must be positive");
}

Mat2c segment_matrix(double n, double length_nm, double wavelength_nm,
                     double loss_amp) {
    if (!(n > 0.0)) throw DomainError("segment index must be positive");
    if (length_nm < 0.0) throw DomainError("segment length must be non-negative");
    if (!(loss_amp > 0.0 && loss_amp <= 1.0)) {
        throw DomainError("loss_amp must be in (0,1]");
    }
    const Complex nc = complex_index(n, length_nm, wavelength_nm, loss_amp);
    const Complex delta = 2.0 * kPi * nc * length_nm / wavelength_nm;
    const Complex c = std::cos(delta), s = std::sin(delta);
    return Mat2c{{{c, kI * s / nc}, {kI * nc * s, c}}};
}

StackAmplitudes stack_response(const std::vector<Mat2c>& matrices, double n_in,
                               double n_out) {
    Mat2c m = identity_mat();
    for (const auto& seg : matrices) m = mat_mul(m, seg);
    const Complex a = m[0][0] + m[0][1] * n_out;
    const Complex b = m[1][0] + m[1][1] * n_out;
    const Complex den = n_in * a + b;
    return {2.0 * n_in / den, (n_in * a - b) / den};
}

std::vector<double> WavelengthGrid::points() const {
    std::vector<double> pts;
    if (!(step_nm > 0.0)) throw DomainError("grid step must be positive");
    if (hi_nm < lo_nm) return pts;
    const int n = static_cast<int>(std::floor((hi_nm - lo_nm) / step_nm + 0.5));
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) pts.push_back(lo_nm + i * step_nm);
    return pts;
}

CavitySpectrum cavity_spectrum(const GratingCavitySpec& spec,
                               const WavelengthGrid& grid,
                               const BaseIndexModel& base_index, int jobs) {
    return spectrum_over(spec, grid.points(), base_index, jobs);
}

CavitySpectrum cavity_spectrum_at(const GratingCavitySpec& spec,
                                  const std::vector<double>& wavelengths_nm,
                                  const BaseIndexModel& base_index, int jobs) {
    return spectrum_over(spec, wavelengths_nm, base_index, jobs);
}

ResonanceReport find_resonance(const CavitySpectrum& spectrum,
                               const ResonanceOptions& opt) {
    const auto& wl = spectrum.wavelengths_nm;
    const auto& T = spectrum.transmission;
    const size_t n = wl.size();
    if (n < 5) throw NoStopband("spectrum too short");

    // Runs of T below threshold.
    struct Run {
        size_t first, last;
        double min_t;
    };
    std::vector<Run> runs;
    for (size_t i = 0; i < n;) {
        if (T[i] < opt.stopband_threshold) {
            size_t j = i;
            double mn = T[i];
            while (j + 1 < n && T[j + 1] < opt.stopband_threshold) {
                ++j;
                mn = std::min(mn, T[j]);
            }
            runs.push_back({i, j, mn});
            i = j + 1;
        } else {
            ++i;
        }
    }
    if (runs.empty()) throw NoStopband("no transmission dip below threshold");

    // Anchor on the run holding the deepest minimum: one side of the defect
    // peak. The peak itself shows up as a narrow above-threshold gap toward
    // a second dark run; band-edge side lobes fail the dark-floor test.
    size_t i_min = 0;
    for (size_t i = 1; i < n; ++i) {
        if (T[i] < T[i_min]) i_min = i;
    }
    size_t anchor = 0;
    while (!(i_min >= runs[anchor].first && i_min <= runs[anchor].last)) ++anchor;

    // A run across the peak must be about as dark as the anchor plateau;
    // band-edge side lobes over a deep band fail the relative test.
    const double dark_floor =
        std::max(opt.bridge_floor_frac * opt.stopband_threshold,
                 4.0 * runs[anchor].min_t);
    struct Candidate {
        size_t run_lo, run_hi; // run indices forming the band
        size_t i_pk;
        double peak_t;
    };
    std::vector<Candidate> candidates;
    auto consider = [&](size_t other) {
        const size_t lo = std::min(anchor, other), hi = std::max(anchor, other);
        const double gap = wl[runs[hi].first] - wl[runs[lo].last];
        if (gap > opt.merge_gap_nm) return;
        if (runs[other].min_t > dark_floor) return;
        size_t i_pk = runs[lo].last + 1;
        for (size_t i = i_pk; i < runs[hi].first; ++i) {
            if (T[i] > T[i_pk]) i_pk = i;
        }
        candidates.push_back({lo, hi, i_pk, T[i_pk]});
    };
    if (anchor > 0) consider(anchor - 1);
    if (anchor + 1 < runs.size()) consider(anchor + 1);

    size_t band_first, band_last, i_pk;
    if (!candidates.empty()) {
        const Candidate& best = *std::max_element(
            candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
                return a.peak_t < b.peak_t;
            });
        band_first = runs[best.run_lo].first;
        band_last = runs[best.run_hi].last;
        i_pk = best.i_pk;
    } else {
        // Sub-threshold peak: the brightest interior sample of the anchor run.
        band_first = runs[anchor].first;
        band_last = runs[anchor].last;
        if (band_last - band_first < 4) throw NoDefectPeak("band too narrow");
        i_pk = band_first + 1;
        for (size_t i = band_first + 1; i < band_last; ++i) {
            if (T[i] > T[i_pk]) i_pk = i;
        }
        // The peak must be a genuine interior maximum, with dips both sides.
        double min_left = T[band_first], min_right = T[band_last];
        for (size_t i = band_first; i < i_pk; ++i) {
            min_left = std::min(min_left, T[i]);
        }
        for (size_t i = i_pk + 1; i <= band_last; ++i) {
            min_right = std::min(min_right, T[i]);
        }
        if (T[i_pk] - std::max(min_left, min_right) < opt.min_peak_height) {
            throw NoDefectPeak("no interior transmission peak above the band floor");
        }
    }

    ResonanceReport rep;
    // Sub-grid band edges by interpolating the threshold crossing.
    rep.stopband_lo_nm =
        band_first > 0
            ? interp_crossing(wl[band_first - 1], T[band_first - 1],
                              wl[band_first], T[band_first],
                              opt.stopband_threshold)
            : wl.front();
    rep.stopband_hi_nm =
        band_last + 1 < n
            ? interp_crossing(wl[band_last], T[band_last], wl[band_last + 1],
                              T[band_last + 1], opt.stopband_threshold)
            : wl.back();

    double floor_t = T[i_min];
    for (size_t i = band_first; i <= band_last; ++i) {
        floor_t = std::min(floor_t, T[i]);
    }
    const double height = T[i_pk] - floor_t;
    if (height < opt.min_peak_height) {
        throw NoDefectPeak("no interior transmission peak above the band floor");
    }

    // Quadratic refinement through the peak sample and its neighbours.
    double lam_pk = wl[i_pk];
    double t_pk = T[i_pk];
    if (i_pk > 0 && i_pk + 1 < n) {
        const double x0 = wl[i_pk - 1], x1 = wl[i_pk], x2 = wl[i_pk + 1];
        const double y0 = T[i_pk - 1], y1 = T[i_pk], y2 = T[i_pk + 1];
        const double d0 = (y1 - y0) / (x1 - x0);
        const double d1 = (y2 - y1) / (x2 - x1);
        const double curv = (d1 - d0) / (0.5 * (x2 - x0));
        if (curv < 0.0) {
            const double vertex = 0.5 * (x0 + x1) - d0 / curv;
            if (vertex > x0 && vertex < x2) {
                lam_pk = vertex;
                // Evaluate the fitted parabola at the vertex.
                t_pk = y1 + 0.5 * curv * (vertex - x1) * (vertex - x1) +
                       ((y2 - y0) / (x2 - x0)) * (vertex - x1);
            }
        }
    }
    rep.lambda_res_nm = lam_pk;
    rep.t0 = t_pk;

    // R0 by linear interpolation at lambda_res.
    {
        size_t i = i_pk;
        if (lam_pk < wl[i] && i > 0) --i;
        const double x0 = wl[i], x1 = wl[std::min(i + 1, n - 1)];
        const double y0 = spectrum.reflection[i];
        const double y1 = spectrum.reflection[std::min(i + 1, n - 1)];
        rep.r0 = x1 > x0 ? y0 + (y1 - y0) * (lam_pk - x0) / (x1 - x0) : y0;
    }

    // FWHM at half the peak-to-floor height, shoulders by linear
    // interpolation.
    const double half = floor_t + 0.5 * height;
    double left = wl[band_first], right = wl[band_last];
    bool found_left = false, found_right = false;
    for (size_t i = i_pk; i > band_first; --i) {
        if (T[i - 1] <= half && T[i] >= half) {
            left = interp_crossing(wl[i - 1], T[i - 1], wl[i], T[i], half);
            found_left = true;
            break;
        }
    }
    for (size_t i = i_pk; i < band_last; ++i) {
        if (T[i + 1] <= half && T[i] >= half) {
            right = interp_crossing(wl[i], T[i], wl[i + 1], T[i + 1], half);
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right) {
        throw NoDefectPeak("peak shoulders not resolved inside the stop band");
    }
    rep.fwhm_nm = right - left;
    if (!(rep.fwhm_nm > 0.0)) throw NoDefectPeak("degenerate peak width");
    rep.q = rep.lambda_res_nm / rep.fwhm_nm;
    return rep;
}

ResonanceScan resonance_scan(const GratingCavitySpec& spec,
                             const ScanGrid& grid,
                             const BaseIndexModel& base_index, int jobs,
                             const ResonanceOptions& options) {
    WavelengthGrid coarse{grid.lo_nm, grid.hi_nm, grid.coarse_step_nm};
    CavitySpectrum spectrum = cavity_spectrum(spec, coarse, base_index, jobs);

    // Locate the band and a first peak estimate on the coarse grid; fall back
    // to a fine scan of the whole band when the coarse grid misses the peak.
    double window_lo, window_hi;
    try {
        const ResonanceReport rough = find_resonance(spectrum, options);
        window_lo = rough.lambda_res_nm - grid.fine_window_nm;
        window_hi = rough.lambda_res_nm + grid.fine_window_nm;
        window_lo = std::max(window_lo, rough.stopband_lo_nm + 0.05);
        window_hi = std::min(window_hi, rough.stopband_hi_nm - 0.05);
    } catch (const NoDefectPeak&) {
        ResonanceOptions wide = options;
        wide.min_peak_height = 0.0;
        // Re-detect just the band edges via the deepest minimum.
        CavitySpectrum tmp = spectrum;
        ResonanceReport bandonly;
        bool have_band = false;
        try {
            bandonly = find_resonance(tmp, wide);
            have_band = true;
        } catch (const Error&) {
        }
        if (!have_band) throw;
        window_lo = bandonly.stopband_lo_nm + 0.05;
        window_hi = bandonly.stopband_hi_nm - 0.05;
    }
    if (window_hi <= window_lo) {
        throw NoDefectPeak("stop band too narrow for a fine scan");
    }

    double step = grid.fine_step_nm;
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> pts = spectrum.wavelengths_nm;
        for (double x = window_lo; x <= window_hi + 0.5 * step; x += step) {
            pts.push_back(x);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [](double a, double b) {
                                  return std::abs(a - b) < 1e-9;
                              }),
                  pts.end());
        spectrum = cavity_spectrum_at(spec, pts, base_index, jobs);
        const ResonanceReport rep = find_resonance(spectrum, options);
        // Enough samples across the line?
        if (rep.fwhm_nm >= 5.0 * step || step <= 1e-4) {
            return {std::move(spectrum), rep};
        }
        window_lo = rep.lambda_res_nm - 5.0 * rep.fwhm_nm;
        window_hi = rep.lambda_res_nm + 5.0 * rep.fwhm_nm;
        step = std::max(rep.fwhm_nm / 20.0, 1e-4);
    }
    return {std::move(spectrum), find_resonance(spectrum, options)};
}

FieldEnvelope intracavity_envelope(const GratingCavitySpec& spec,
                                   double wavelength_nm,
                                   const BaseIndexModel& base_index) {
    spec.validate();
    const double base = base_index ? base_index(wavelength_nm) : spec.base_n_eff;
    const auto segs = build_stack(spec, base);
    const auto amp = stack_amplitudes(segs, base, wavelength_nm);

    // (E, H) at every boundary by backward partial products.
    const size_t ns = segs.size();
    std::vector<std::array<Complex, 2>> eh(ns + 1);
    eh[ns] = {amp.t, base * amp.t};
    for (size_t j = ns; j-- > 0;) {
        const Mat2c m = segment_matrix(segs[j].n, segs[j].length_nm,
                                       wavelength_nm, segs[j].loss_amp);
        eh[j] = {m[0][0] * eh[j + 1][0] + m[0][1] * eh[j + 1][1],
                 m[1][0] * eh[j + 1][0] + m[1][1] * eh[j + 1][1]};
    }

    FieldEnvelope env;
    env.defect_width_nm = spec.defect_width_nm;
    env.stack_length_nm = spec.stack_length_nm();
    const double z_front = -0.5 * env.stack_length_nm;

    // In-segment field from the right-boundary values: with
    // (E,H)_left = M(delta) (E,H)_right, the layer field is
    // E(z) = p e^{ik(L-z)} + q e^{-ik(L-z)}, p the transmitted-direction wave.
    const double sample_step = 20.0; // nm; fine against the ~period standing wave
    double z_left = z_front;
    for (size_t j = 0; j < ns; ++j) {
        const Complex nc = complex_index(segs[j].n, segs[j].length_nm,
                                         wavelength_nm, segs[j].loss_amp);
        const Complex fwd = 0.5 * (eh[j + 1][0] + eh[j + 1][1] / nc);
        const Complex bwd = 0.5 * (eh[j + 1][0] - eh[j + 1][1] / nc);
        const int nsub = std::max(
            2, static_cast<int>(std::ceil(segs[j].length_nm / sample_step)));
        const Complex k = 2.0 * kPi * nc / wavelength_nm;
        for (int s = 0; s < nsub; ++s) {
            const double dz = segs[j].length_nm * s / nsub;
            const Complex phase =
                std::exp(kI * k * (segs[j].length_nm - dz));
            const Complex e = fwd * phase + bwd / phase;
            env.z_nm.push_back(z_left + dz);
            env.intensity.push_back(std::norm(e));
        }
        z_left += segs[j].length_nm;
    }
    env.z_nm.push_back(z_left);
    env.intensity.push_back(std::norm(eh[ns][0]));

    const double peak =
        *std::max_element(env.intensity.begin(), env.intensity.end());
    if (peak > 0.0) {
        for (auto& v : env.intensity) v /= peak;
    }
    return env;
}

EffectiveLength effective_length(const FieldEnvelope& envelope) {
    const auto& z = envelope.z_nm;
    const auto& I = envelope.intensity;
    if (z.size() < 7) throw FitFailed("envelope too short");

    // Strict local maxima on each mirror side.
    std::vector<double> zl, il, zr, ir;
    const double half_defect = 0.5 * envelope.defect_width_nm;
    for (size_t i = 1; i + 1 < z.size(); ++i) {
        if (!(I[i] > I[i - 1] && I[i] > I[i + 1])) continue;
        if (I[i] <= 0.0) continue;
        if (z[i] < -half_defect) {
            zl.push_back(-z[i]); // distance from center
            il.push_back(I[i]);
        } else if (z[i] > half_defect) {
            zr.push_back(z[i]);
            ir.push_back(I[i]);
        }
    }
    if (zl.size() < 5 || zr.size() < 5) {
        throw FitFailed("fewer than 5 envelope maxima per side");
    }

    auto fit_decay = [&](const std::vector<double>& x,
                         const std::vector<double>& y) {
        // Least squares on log intensity vs distance.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const size_t n = x.size();
        for (size_t i = 0; i < n; ++i) {
            const double ly = std::log(y[i]);
            sx += x[i];
            sy += ly;
            sxx += x[i] * x[i];
            sxy += x[i] * ly;
        }
        const double denom = n * sxx - sx * sx;
        return (n * sxy - sx * sy) / denom; // slope, 1/nm
    };

    EffectiveLength out;
    const double slope_l = fit_decay(zl, il);
    const double slope_r = fit_decay(zr, ir);
    const double half_stack = 0.5 * envelope.stack_length_nm;
    auto decay_len = [&](double slope) {
        if (slope >= -1.0 / (4.0 * half_stack)) {
            out.exceeds_stack = true;
            return half_stack;
        }
        return std::min(-1.0 / slope, half_stack);
    };
    out.decay_left_nm = decay_len(slope_l);
    out.decay_right_nm = decay_len(slope_r);
    out.l_eff_nm =
        envelope.defect_width_nm + out.decay_left_nm + out.decay_right_nm;
    return out;
}

ContrastCalibration calibrate_contrast(const CalibrationTargets& targets,
                                       const GratingCavitySpec& spec_template,
                                       int max_iterations, int jobs) {
    if (!(targets.stopband_width_nm > 0.0)) {
        throw DomainError("stop-band width target must be positive");
    }
    if (!(targets.lambda_res_nm > 0.0)) {
        throw DomainError("lambda_res target must be positive");
    }

    const double tol_nm = 0.1;
    GratingCavitySpec spec = spec_template;
    double delta_n = spec.delta_n > 0.0 ? spec.delta_n : 0.02;
    double mean_n = targets.lambda_res_nm / (2.0 * spec.period_nm);

    ScanGrid grid;
    grid.lo_nm = targets.lambda_res_nm - 15.0;
    grid.hi_nm = targets.lambda_res_nm + 15.0;

    for (int it = 1; it <= max_iterations; ++it) {
        spec.delta_n = delta_n;
        spec.base_n_eff = mean_n - spec.duty_cycle * delta_n;
        const auto scan = resonance_scan(spec, grid, {}, jobs);
        const double width =
            scan.report.stopband_hi_nm - scan.report.stopband_lo_nm;
        const double err_lambda = scan.report.lambda_res_nm - targets.lambda_res_nm;
        const double err_width = width - targets.stopband_width_nm;
        if (std::abs(err_lambda) < tol_nm && std::abs(err_width) < tol_nm) {
            return {delta_n, spec.base_n_eff, it};
        }
        mean_n -= err_lambda / (2.0 * spec.period_nm);
        const double ratio = targets.stopband_width_nm / std::max(width, 1e-6);
        delta_n *= std::clamp(ratio, 0.5, 2.0);
    }
    throw NoConvergence("contrast calibration did not meet targets");
}

double calibrate_slat_loss(double target_kappa_sc_ghz,
                           const GratingCavitySpec& spec, int jobs) {
    if (target_kappa_sc_ghz < 0.0) {
        throw DomainError("kappa_sc target must be non-negative");
    }
    if (target_kappa_sc_ghz == 0.0) return 1.0;

    auto fitted = [&](double loss) {
        GratingCavitySpec s = spec;
        s.slat_loss = loss;
        const auto points = mirror_scan_points(s, {}, jobs);
        return fit_kappa_sc(points).kappa_sc_ghz;
    };

    // Geometric descent from lossless to bracket the target.
    const double rel_tol = 0.05;
    double h_lo = 0.0; // kappa_sc(1 - h_lo) below target
    double h_hi = 1e-5;
    double f_hi = 0.0;
    for (;;) {
        if (1.0 - h_hi <= 0.99) {
            throw NoConvergence("slat_loss left (0.99, 1] while bracketing");
        }
        f_hi = fitted(1.0 - h_hi);
        if (std::abs(f_hi - target_kappa_sc_ghz) <=
            rel_tol * target_kappa_sc_ghz) {
            return 1.0 - h_hi;
        }
        if (f_hi > target_kappa_sc_ghz) break;
        h_lo = h_hi;
        h_hi *= 2.0;
    }

    for (int it = 0; it < 60; ++it) {
        const double h = 0.5 * (h_lo + h_hi);
        const double f = fitted(1.0 - h);
        if (std::abs(f - target_kappa_sc_ghz) <= rel_tol * target_kappa_sc_ghz) {
            return 1.0 - h;
        }
        if (f > target_kappa_sc_ghz) {
            h_hi = h;
        } else {
            h_lo = h;
        }
    }
    throw NoConvergence("slat_loss bisection did not reach the kappa_sc target");
}

} // namespace capcav

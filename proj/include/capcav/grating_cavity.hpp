#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace capcav {

enum class Polarization { X, Y };

// The DMG-loaded cavity reduced to a 1-D effective-index stack: N slat
// periods split equally around a central defect segment. delta_n and
// slat_loss are calibration parameters, not geometry.
struct GratingCavitySpec {
    double period_nm = 244.0;       // grating period
    double duty_cycle = 0.15;       // slat thickness = duty_cycle * period
    int slat_count = 400;           // total over both sides, even
    double defect_width_nm = 366.0; // 1.5 * period by default
    double base_n_eff = 1.2533;     // unperturbed effective index
    double delta_n = 0.0;           // index contrast added on slats
    double slat_loss = 1.0;         // per-slat amplitude transmission, (0,1]
    double slat_height_um = 2.0;    // metadata only; unused by the 1-D model
    Polarization polarization = Polarization::Y;

    void validate() const;
    double slat_thickness_nm() const { return duty_cycle * period_nm; }
    // Mean index over one period; sets the Bragg center 2*mean*period.
    double mean_index() const { return base_n_eff + duty_cycle * delta_n; }
    // Full stack extent, nm.
    double stack_length_nm() const {
        return slat_count * period_nm + defect_width_nm;
    }
};

using Mat2c = std::array<std::array<std::complex<double>, 2>, 2>;

// Characteristic matrix of one homogeneous segment. loss_amp in (0, 1]
// multiplies the amplitude transmitted across the segment (implemented as an
// imaginary index part). length 0 gives the identity.
Mat2c segment_matrix(double n, double length_nm, double wavelength_nm,
                     double loss_amp);

struct StackAmplitudes {
    std::complex<double> t, r;
};

// Transmission/reflection amplitudes of a composed stack of segment matrices
// between semi-infinite media of the given indices.
StackAmplitudes stack_response(const std::vector<Mat2c>& matrices, double n_in,
                               double n_out);

// Optional per-wavelength base index (from the mode solver); empty means the
// constant GratingCavitySpec::base_n_eff.
using BaseIndexModel = std::function<double(double wavelength_nm)>;

struct WavelengthGrid {
    double lo_nm = 600.0;
    double hi_nm = 640.0;
    double step_nm = 0.1;
    std::vector<double> points() const;
};

struct CavitySpectrum {
    std::vector<double> wavelengths_nm; // ascending
    std::vector<std::complex<double>> t_amp, r_amp;
    std::vector<double> transmission, reflection; // |t|^2, |r|^2
};

// Amplitudes and intensities over the grid. Points may be evaluated in
// parallel (jobs > 1); assembly is in grid order.
CavitySpectrum cavity_spectrum(const GratingCavitySpec& spec,
                               const WavelengthGrid& grid,
                               const BaseIndexModel& base_index = {},
                               int jobs = 1);

// Same, over an explicit (ascending) wavelength list.
CavitySpectrum cavity_spectrum_at(const GratingCavitySpec& spec,
                                  const std::vector<double>& wavelengths_nm,
                                  const BaseIndexModel& base_index = {},
                                  int jobs = 1);

struct ResonanceOptions {
    double stopband_threshold = 0.5; // T below this counts as stop band
    double merge_gap_nm = 2.5;       // bridge the defect peak's gap in the mask
    double bridge_floor_frac = 0.5;  // a bridged run must dip below this
                                     // fraction of the threshold
    double min_peak_height = 0.01;   // smallest accepted peak-to-floor height
};

struct ResonanceReport {
    double lambda_res_nm = 0.0;
    double fwhm_nm = 0.0;
    double t0 = 0.0, r0 = 0.0;
    double q = 0.0;
    double stopband_lo_nm = 0.0, stopband_hi_nm = 0.0;
};

// Locates the stop band (widest below-threshold region around the deepest
// minimum, bridging the narrow defect peak) and the interior transmission
// peak; quadratic refinement at the peak, linear interpolation on the FWHM
// shoulders. Throws NoStopband / NoDefectPeak.
ResonanceReport find_resonance(const CavitySpectrum& spectrum,
                               const ResonanceOptions& options = {});

struct ScanGrid {
    double lo_nm = 600.0;
    double hi_nm = 640.0;
    double coarse_step_nm = 0.1;
    double fine_step_nm = 0.01;
    double fine_window_nm = 2.0; // half-width of the fine pass around the peak
};

struct ResonanceScan {
    CavitySpectrum spectrum; // coarse grid merged with the fine window
    ResonanceReport report;
};

// Two-pass resonance measurement: coarse spectrum to locate the stop band and
// peak, fine pass across the peak, extra refinement when the linewidth is not
// resolved by the fine step.
ResonanceScan resonance_scan(const GratingCavitySpec& spec,
                             const ScanGrid& grid = {},
                             const BaseIndexModel& base_index = {},
                             int jobs = 1,
                             const ResonanceOptions& options = {});

struct FieldEnvelope {
    std::vector<double> z_nm;      // relative to defect center
    std::vector<double> intensity; // |forward + backward|^2, peak = 1
    double defect_width_nm = 0.0;
    double stack_length_nm = 0.0;
};

// Intracavity |E|^2 envelope from partial transfer-matrix products, sampled
// within every segment.
FieldEnvelope intracavity_envelope(const GratingCavitySpec& spec,
                                   double wavelength_nm,
                                   const BaseIndexModel& base_index = {});

struct EffectiveLength {
    double l_eff_nm = 0.0;
    double decay_left_nm = 0.0;  // 1/e intensity decay length, left mirror
    double decay_right_nm = 0.0;
    bool exceeds_stack = false;  // non-decaying fit; value clamped to stack
};

// l_eff = w_g + z_d(left) + z_d(right), from least-squares lines through
// log(local envelope maxima) vs |z| on each side. Throws FitFailed when a
// side has fewer than 5 local maxima.
EffectiveLength effective_length(const FieldEnvelope& envelope);

struct CalibrationTargets {
    double lambda_res_nm = 619.0;
    double stopband_width_nm = 4.0;
};

struct ContrastCalibration {
    double delta_n = 0.0;
    double base_n_eff = 0.0;
    int iterations = 0;
};

// Two-parameter fixed-point iteration: the mean index steers the Bragg
// center, delta_n the stop-band width; stops when both targets are met
// within 0.1 nm. Throws NoConvergence.
ContrastCalibration calibrate_contrast(const CalibrationTargets& targets,
                                       const GratingCavitySpec& spec_template,
                                       int max_iterations = 60,
                                       int jobs = 1);

// Adjusts slat_loss so the N-sweep fit of the scattering rate recovers
// target_kappa_sc_ghz within 5%; bisection on slat_loss in (0.99, 1].
double calibrate_slat_loss(double target_kappa_sc_ghz,
                           const GratingCavitySpec& spec,
                           int jobs = 1);

} // namespace capcav

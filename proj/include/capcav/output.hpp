#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capcav/emitter_coupling.hpp"
#include "capcav/grating_cavity.hpp"
#include "capcav/qed_figures.hpp"

namespace capcav {

// Provenance stamp embedded in every output file.
struct Provenance {
    std::string version;
    std::uint64_t config_hash = 0;

    std::string hash_hex() const;
    // CSV comment line, "# capcav <version> config=<hex>".
    std::string csv_comment() const;
};

// value -> string with 9 significant digits ('.' decimal separator).
std::string fmt9(double value);

void write_text_file(const std::string& path, const std::string& content);

// CSV with header `wavelength_nm,T,R`.
std::string spectrum_csv(const CavitySpectrum& spectrum, const Provenance& prov);

// CSV with header `delta_z_nm,eta`.
std::string position_sweep_csv(const PositionSweep& sweep, const Provenance& prov);

// Figure-set JSON with the fixed key order
// kappa_ghz, kappa_sc_ghz, q, q_sc, finesse, finesse_sc, one_pass_loss,
// purcell, two_g0_ghz, eta_cav, l_eff_um. Non-finite values serialize as null.
std::string figure_set_json(const QedFigureSet& figures, const Provenance& prov);

// Minimal deterministic SVG line plot.
struct SvgSeries {
    std::vector<double> x, y;
};
struct SvgMarker {
    double x, y;
    std::string label;
};
std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<SvgSeries>& series,
                          const std::vector<SvgMarker>& markers = {});

} // namespace capcav

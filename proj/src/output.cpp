#include "capcav/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "capcav/errors.hpp"

namespace capcav {

std::string Provenance::hash_hex() const {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    return buf;
}

std::string Provenance::csv_comment() const {
    return "# capcav " + version + " config=" + hash_hex() + "\n";
}

std::string fmt9(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + p.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string spectrum_csv(const CavitySpectrum& spectrum, const Provenance& prov) {
    std::string out = prov.csv_comment();
    out += "wavelength_nm,T,R\n";
    for (size_t i = 0; i < spectrum.wavelengths_nm.size(); ++i) {
        out += fmt9(spectrum.wavelengths_nm[i]);
        out += ',';
        out += fmt9(spectrum.transmission[i]);
        out += ',';
        out += fmt9(spectrum.reflection[i]);
        out += '\n';
    }
    return out;
}

std::string position_sweep_csv(const PositionSweep& sweep, const Provenance& prov) {
    std::string out = prov.csv_comment();
    out += "delta_z_nm,eta\n";
    for (const auto& p : sweep.points) {
        out += fmt9(p.delta_z_nm);
        out += ',';
        out += fmt9(p.eta);
        out += '\n';
    }
    return out;
}

namespace {

std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    return fmt9(v);
}

} // namespace

std::string figure_set_json(const QedFigureSet& f, const Provenance& prov) {
    std::string out = "{\n";
    out += "  \"kappa_ghz\": " + json_number(f.kappa_ghz) + ",\n";
    out += "  \"kappa_sc_ghz\": " + json_number(f.kappa_sc_ghz) + ",\n";
    out += "  \"q\": " + json_number(f.q) + ",\n";
    out += "  \"q_sc\": " + json_number(f.q_sc) + ",\n";
    out += "  \"finesse\": " + json_number(f.finesse) + ",\n";
    out += "  \"finesse_sc\": " + json_number(f.finesse_sc) + ",\n";
    out += "  \"one_pass_loss\": " + json_number(f.one_pass_loss) + ",\n";
    out += "  \"purcell\": " + json_number(f.purcell) + ",\n";
    out += "  \"two_g0_ghz\": " + json_number(f.two_g0_ghz) + ",\n";
    out += "  \"eta_cav\": " + json_number(f.eta_cav) + ",\n";
    out += "  \"l_eff_um\": " + json_number(f.l_eff_um) + ",\n";
    out += "  \"provenance\": {\"toolkit_version\": \"" + prov.version +
           "\", \"config_hash\": \"" + prov.hash_hex() + "\"}\n";
    out += "}\n";
    return out;
}

namespace {

constexpr int kWidth = 800, kHeight = 500;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;

struct Range {
    double lo = 0.0, hi = 1.0;
    double map(double v, double px_lo, double px_hi) const {
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return px_lo + t * (px_hi - px_lo);
    }
};

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<SvgSeries>& series,
                          const std::vector<SvgMarker>& markers) {
    Range xr{std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};
    Range yr = xr;
    for (const auto& s : series) {
        for (double v : s.x) {
            xr.lo = std::min(xr.lo, v);
            xr.hi = std::max(xr.hi, v);
        }
        for (double v : s.y) {
            yr.lo = std::min(yr.lo, v);
            yr.hi = std::max(yr.hi, v);
        }
    }
    if (!(xr.hi > xr.lo)) {
        xr.lo -= 0.5;
        xr.hi += 0.5;
    }
    if (!(yr.hi > yr.lo)) {
        yr.lo -= 0.5;
        yr.hi += 0.5;
    }

    const double px_l = kMarginL, px_r = kWidth - kMarginR;
    const double py_t = kMarginT, py_b = kHeight - kMarginB;
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
           "height=\"500\" viewBox=\"0 0 800 500\">\n";
    svg += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
    svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";
    // Axes.
    svg += "<line x1=\"" + fmt_px(px_l) + "\" y1=\"" + fmt_px(py_b) +
           "\" x2=\"" + fmt_px(px_r) + "\" y2=\"" + fmt_px(py_b) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt_px(px_l) + "\" y1=\"" + fmt_px(py_t) +
           "\" x2=\"" + fmt_px(px_l) + "\" y2=\"" + fmt_px(py_b) +
           "\" stroke=\"black\"/>\n";
    // Axis labels and end-point ticks.
    svg += "<text x=\"400\" y=\"490\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"13\">" + x_label + "</text>\n";
    svg += "<text x=\"16\" y=\"270\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 16 270)\">" + y_label + "</text>\n";
    svg += "<text x=\"" + fmt_px(px_l) + "\" y=\"" + fmt_px(py_b + 18) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt9(xr.lo) +
           "</text>\n";
    svg += "<text x=\"" + fmt_px(px_r) + "\" y=\"" + fmt_px(py_b + 18) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + fmt9(xr.hi) + "</text>\n";
    svg += "<text x=\"" + fmt_px(px_l - 6) + "\" y=\"" + fmt_px(py_b) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + fmt9(yr.lo) + "</text>\n";
    svg += "<text x=\"" + fmt_px(px_l - 6) + "\" y=\"" + fmt_px(py_t + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + fmt9(yr.hi) + "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        std::string pts;
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            pts += fmt_px(xr.map(s.x[i], px_l, px_r));
            pts += ',';
            pts += fmt_px(yr.map(s.y[i], py_b, py_t));
            pts += ' ';
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += kColors[si % 4];
        svg += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    for (const auto& m : markers) {
        const double cx = xr.map(m.x, px_l, px_r);
        const double cy = yr.map(m.y, py_b, py_t);
        svg += "<circle cx=\"" + fmt_px(cx) + "\" cy=\"" + fmt_px(cy) +
               "\" r=\"4\" fill=\"#d62728\"/>\n";
        if (!m.label.empty()) {
            svg += "<text x=\"" + fmt_px(cx + 6) + "\" y=\"" + fmt_px(cy - 6) +
                   "\" font-family=\"sans-serif\" font-size=\"11\">" + m.label +
                   "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace capcav

#include "capcav/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "capcav/errors.hpp"

namespace capcav {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Ctx {
    RunConfig* cfg;
    std::vector<ConfigViolation>* violations;
    int line;
};

using Setter = std::function<void(Ctx&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct KeyDef {
    std::string name;
    Setter set;
    Getter get;
};

bool parse_double(const std::string& v, double* out) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') return false;
    *out = d;
    return true;
}

Setter num_setter(double RunConfig::* field) {
    return [field](Ctx& c, const std::string& v) {
        double d;
        if (!parse_double(v, &d)) {
            c.violations->push_back({c.line, "expected a number, got '" + v + "'"});
            return;
        }
        (*c.cfg).*field = d;
    };
}

Setter opt_setter(std::optional<double> RunConfig::* field) {
    return [field](Ctx& c, const std::string& v) {
        if (v == "unset") {
            (*c.cfg).*field = std::nullopt;
            return;
        }
        double d;
        if (!parse_double(v, &d)) {
            c.violations->push_back({c.line, "expected a number, got '" + v + "'"});
            return;
        }
        (*c.cfg).*field = d;
    };
}

Setter int_setter(int RunConfig::* field) {
    return [field](Ctx& c, const std::string& v) {
        double d;
        if (!parse_double(v, &d) || d != static_cast<int>(d)) {
            c.violations->push_back({c.line, "expected an integer, got '" + v + "'"});
            return;
        }
        (*c.cfg).*field = static_cast<int>(d);
    };
}

Setter str_setter(std::string RunConfig::* field) {
    return [field](Ctx& c, const std::string& v) { (*c.cfg).*field = v; };
}

Setter bool_setter(bool RunConfig::* field) {
    return [field](Ctx& c, const std::string& v) {
        if (v == "true" || v == "1") {
            (*c.cfg).*field = true;
        } else if (v == "false" || v == "0") {
            (*c.cfg).*field = false;
        } else {
            c.violations->push_back({c.line, "expected true/false, got '" + v + "'"});
        }
    };
}

Getter num_getter(double RunConfig::* field) {
    return [field](const RunConfig& c) { return num17(c.*field); };
}

Getter opt_getter(std::optional<double> RunConfig::* field) {
    return [field](const RunConfig& c) {
        return (c.*field) ? num17(*(c.*field)) : std::string("unset");
    };
}

Setter report_setter(double ReportTargets::* field) {
    return [field](Ctx& c, const std::string& v) {
        double d;
        if (!parse_double(v, &d)) {
            c.violations->push_back({c.line, "expected a number, got '" + v + "'"});
            return;
        }
        c.cfg->report.*field = d;
    };
}

Getter report_getter(double ReportTargets::* field) {
    return [field](const RunConfig& c) { return num17(c.report.*field); };
}

Setter coupling_setter(double CouplingSurrogate::* field) {
    return [field](Ctx& c, const std::string& v) {
        double d;
        if (!parse_double(v, &d)) {
            c.violations->push_back({c.line, "expected a number, got '" + v + "'"});
            return;
        }
        c.cfg->coupling.*field = d;
    };
}

Getter coupling_getter(double CouplingSurrogate::* field) {
    return [field](const RunConfig& c) { return num17(c.coupling.*field); };
}

const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> table = [] {
        std::vector<KeyDef> t;
        auto add = [&t](std::string name, Setter s, Getter g) {
            t.push_back({std::move(name), std::move(s), std::move(g)});
        };
        add("geometry.d_in_nm", num_setter(&RunConfig::d_in_nm),
            num_getter(&RunConfig::d_in_nm));
        add("geometry.d_out_nm", num_setter(&RunConfig::d_out_nm),
            num_getter(&RunConfig::d_out_nm));
        add("geometry.core", str_setter(&RunConfig::core_material),
            [](const RunConfig& c) { return c.core_material; });
        add("geometry.shell", str_setter(&RunConfig::shell_material),
            [](const RunConfig& c) { return c.shell_material; });
        add("geometry.cladding", str_setter(&RunConfig::cladding_material),
            [](const RunConfig& c) { return c.cladding_material; });
        add("geometry.wavelength_nm", num_setter(&RunConfig::wavelength_nm),
            num_getter(&RunConfig::wavelength_nm));

        add("grating.period_nm", num_setter(&RunConfig::period_nm),
            num_getter(&RunConfig::period_nm));
        add("grating.duty_cycle", num_setter(&RunConfig::duty_cycle),
            num_getter(&RunConfig::duty_cycle));
        add("grating.slat_count", int_setter(&RunConfig::slat_count),
            [](const RunConfig& c) { return std::to_string(c.slat_count); });
        add("grating.defect_width_nm", opt_setter(&RunConfig::defect_width_nm),
            opt_getter(&RunConfig::defect_width_nm));
        add("grating.slat_height_um", num_setter(&RunConfig::slat_height_um),
            num_getter(&RunConfig::slat_height_um));
        add("grating.polarization", str_setter(&RunConfig::polarization),
            [](const RunConfig& c) { return c.polarization; });
        add("grating.delta_n", opt_setter(&RunConfig::delta_n),
            opt_getter(&RunConfig::delta_n));
        add("grating.base_n_eff", opt_setter(&RunConfig::base_n_eff),
            opt_getter(&RunConfig::base_n_eff));
        add("grating.slat_loss", opt_setter(&RunConfig::slat_loss),
            opt_getter(&RunConfig::slat_loss));
        add("grating.target_lambda_res_nm",
            num_setter(&RunConfig::target_lambda_res_nm),
            num_getter(&RunConfig::target_lambda_res_nm));
        add("grating.target_stopband_nm",
            num_setter(&RunConfig::target_stopband_nm),
            num_getter(&RunConfig::target_stopband_nm));
        add("grating.target_kappa_sc_ghz",
            num_setter(&RunConfig::target_kappa_sc_ghz),
            num_getter(&RunConfig::target_kappa_sc_ghz));

        add("emitter.gamma_ghz", num_setter(&RunConfig::gamma_ghz),
            num_getter(&RunConfig::gamma_ghz));
        add("emitter.beta0", num_setter(&RunConfig::beta0),
            num_getter(&RunConfig::beta0));
        add("emitter.purcell", num_setter(&RunConfig::purcell),
            num_getter(&RunConfig::purcell));
        add("emitter.delta_z_nm", num_setter(&RunConfig::delta_z_nm),
            num_getter(&RunConfig::delta_z_nm));
        add("emitter.radial_offset_nm",
            num_setter(&RunConfig::radial_offset_nm),
            num_getter(&RunConfig::radial_offset_nm));
        add("emitter.theta_rad", num_setter(&RunConfig::theta_rad),
            num_getter(&RunConfig::theta_rad));
        add("emitter.pol_axis", str_setter(&RunConfig::pol_axis),
            [](const RunConfig& c) { return c.pol_axis; });

        add("coupling.eta_anti_y", coupling_setter(&CouplingSurrogate::eta_anti_y),
            coupling_getter(&CouplingSurrogate::eta_anti_y));
        add("coupling.eta_anti_x", coupling_setter(&CouplingSurrogate::eta_anti_x),
            coupling_getter(&CouplingSurrogate::eta_anti_x));
        add("coupling.eta_node_y", coupling_setter(&CouplingSurrogate::eta_node_y),
            coupling_getter(&CouplingSurrogate::eta_node_y));
        add("coupling.eta_node_x", coupling_setter(&CouplingSurrogate::eta_node_x),
            coupling_getter(&CouplingSurrogate::eta_node_x));
        add("coupling.eta_z_floor", coupling_setter(&CouplingSurrogate::eta_z_floor),
            coupling_getter(&CouplingSurrogate::eta_z_floor));
        add("coupling.standing_period_nm",
            coupling_setter(&CouplingSurrogate::standing_period_nm),
            coupling_getter(&CouplingSurrogate::standing_period_nm));

        add("spectrum.grid_lo_nm", num_setter(&RunConfig::grid_lo_nm),
            num_getter(&RunConfig::grid_lo_nm));
        add("spectrum.grid_hi_nm", num_setter(&RunConfig::grid_hi_nm),
            num_getter(&RunConfig::grid_hi_nm));
        add("spectrum.coarse_step_nm", num_setter(&RunConfig::coarse_step_nm),
            num_getter(&RunConfig::coarse_step_nm));
        add("spectrum.fine_step_nm", num_setter(&RunConfig::fine_step_nm),
            num_getter(&RunConfig::fine_step_nm));

        add("sweep.parameter", str_setter(&RunConfig::sweep_parameter),
            [](const RunConfig& c) { return c.sweep_parameter; });
        add("sweep.from", num_setter(&RunConfig::sweep_from),
            num_getter(&RunConfig::sweep_from));
        add("sweep.to", num_setter(&RunConfig::sweep_to),
            num_getter(&RunConfig::sweep_to));
        add("sweep.step", num_setter(&RunConfig::sweep_step),
            num_getter(&RunConfig::sweep_step));

        add("output.dir", str_setter(&RunConfig::out_dir),
            [](const RunConfig& c) { return c.out_dir; });
        add("output.formats", str_setter(&RunConfig::formats),
            [](const RunConfig& c) { return c.formats; });
        add("output.svg", bool_setter(&RunConfig::svg),
            [](const RunConfig& c) { return c.svg ? "true" : "false"; });

        add("report.q_y", report_setter(&ReportTargets::q_y),
            report_getter(&ReportTargets::q_y));
        add("report.q_x", report_setter(&ReportTargets::q_x),
            report_getter(&ReportTargets::q_x));
        add("report.kappa_ghz", report_setter(&ReportTargets::kappa_ghz),
            report_getter(&ReportTargets::kappa_ghz));
        add("report.kappa_sc_ghz", report_setter(&ReportTargets::kappa_sc_ghz),
            report_getter(&ReportTargets::kappa_sc_ghz));
        add("report.q_sc", report_setter(&ReportTargets::q_sc),
            report_getter(&ReportTargets::q_sc));
        add("report.finesse", report_setter(&ReportTargets::finesse),
            report_getter(&ReportTargets::finesse));
        add("report.finesse_sc", report_setter(&ReportTargets::finesse_sc),
            report_getter(&ReportTargets::finesse_sc));
        add("report.one_pass_loss", report_setter(&ReportTargets::one_pass_loss),
            report_getter(&ReportTargets::one_pass_loss));
        add("report.two_g0_ghz", report_setter(&ReportTargets::two_g0_ghz),
            report_getter(&ReportTargets::two_g0_ghz));
        add("report.eta_cav", report_setter(&ReportTargets::eta_cav),
            report_getter(&ReportTargets::eta_cav));
        add("report.eta_fdtd", report_setter(&ReportTargets::eta_fdtd),
            report_getter(&ReportTargets::eta_fdtd));
        add("report.l_eff_um", report_setter(&ReportTargets::l_eff_um),
            report_getter(&ReportTargets::l_eff_um));
        add("report.measure_y_lambda_nm",
            report_setter(&ReportTargets::measure_y_lambda_nm),
            report_getter(&ReportTargets::measure_y_lambda_nm));
        add("report.measure_y_fwhm_nm",
            report_setter(&ReportTargets::measure_y_fwhm_nm),
            report_getter(&ReportTargets::measure_y_fwhm_nm));
        add("report.measure_x_lambda_nm",
            report_setter(&ReportTargets::measure_x_lambda_nm),
            report_getter(&ReportTargets::measure_x_lambda_nm));
        add("report.measure_x_fwhm_nm",
            report_setter(&ReportTargets::measure_x_fwhm_nm),
            report_getter(&ReportTargets::measure_x_fwhm_nm));
        add("report.tol_q", report_setter(&ReportTargets::tol_q),
            report_getter(&ReportTargets::tol_q));
        add("report.tol_kappa", report_setter(&ReportTargets::tol_kappa),
            report_getter(&ReportTargets::tol_kappa));
        add("report.tol_q_sc", report_setter(&ReportTargets::tol_q_sc),
            report_getter(&ReportTargets::tol_q_sc));
        add("report.tol_finesse", report_setter(&ReportTargets::tol_finesse),
            report_getter(&ReportTargets::tol_finesse));
        add("report.tol_finesse_sc", report_setter(&ReportTargets::tol_finesse_sc),
            report_getter(&ReportTargets::tol_finesse_sc));
        add("report.tol_one_pass_loss",
            report_setter(&ReportTargets::tol_one_pass_loss),
            report_getter(&ReportTargets::tol_one_pass_loss));
        add("report.tol_two_g0", report_setter(&ReportTargets::tol_two_g0),
            report_getter(&ReportTargets::tol_two_g0));
        add("report.tol_eta_cav_pp", report_setter(&ReportTargets::tol_eta_cav_pp),
            report_getter(&ReportTargets::tol_eta_cav_pp));
        add("report.tol_eta_fdtd", report_setter(&ReportTargets::tol_eta_fdtd),
            report_getter(&ReportTargets::tol_eta_fdtd));
        add("report.tol_lambda_res_nm",
            report_setter(&ReportTargets::tol_lambda_res_nm),
            report_getter(&ReportTargets::tol_lambda_res_nm));
        add("report.tol_q_cav", report_setter(&ReportTargets::tol_q_cav),
            report_getter(&ReportTargets::tol_q_cav));
        add("report.tol_kappa_sc", report_setter(&ReportTargets::tol_kappa_sc),
            report_getter(&ReportTargets::tol_kappa_sc));
        add("report.l_eff_lo_um", report_setter(&ReportTargets::l_eff_lo_um),
            report_getter(&ReportTargets::l_eff_lo_um));
        add("report.l_eff_hi_um", report_setter(&ReportTargets::l_eff_hi_um),
            report_getter(&ReportTargets::l_eff_hi_um));
        std::sort(t.begin(), t.end(),
                  [](const KeyDef& a, const KeyDef& b) { return a.name < b.name; });
        return t;
    }();
    return table;
}

const KeyDef* find_key(const std::string& name) {
    const auto& t = key_table();
    auto it = std::lower_bound(
        t.begin(), t.end(), name,
        [](const KeyDef& k, const std::string& n) { return k.name < n; });
    if (it != t.end() && it->name == name) return &*it;
    return nullptr;
}

void check_material(const std::string& name, const std::string& key,
                    std::vector<ConfigViolation>& out) {
    try {
        OpticalMaterial::from_name(name);
    } catch (const Error&) {
        out.push_back({0, key + ": unknown material '" + name + "'"});
    }
}

// Cross-field constraints; every violation is reported.
void validate(const RunConfig& c, std::vector<ConfigViolation>& out) {
    if (c.d_in_nm < 0.0) out.push_back({0, "geometry.d_in_nm must be >= 0"});
    if (!(c.d_out_nm > 0.0)) out.push_back({0, "geometry.d_out_nm must be > 0"});
    if (!(c.d_in_nm < c.d_out_nm)) {
        out.push_back({0, "geometry.d_in_nm must be smaller than geometry.d_out_nm"});
    }
    if (c.wavelength_nm < kMinWavelengthNm || c.wavelength_nm > kMaxWavelengthNm) {
        out.push_back({0, "geometry.wavelength_nm must be in [400, 1000]"});
    }
    check_material(c.core_material, "geometry.core", out);
    check_material(c.shell_material, "geometry.shell", out);
    check_material(c.cladding_material, "geometry.cladding", out);

    if (!(c.period_nm > 0.0)) out.push_back({0, "grating.period_nm must be > 0"});
    if (!(c.duty_cycle > 0.0 && c.duty_cycle < 1.0)) {
        out.push_back({0, "duty_cycle must be in (0,1)"});
    }
    if (c.slat_count < 2 || c.slat_count % 2 != 0) {
        out.push_back({0, "grating.slat_count must be even and >= 2"});
    }
    if (c.defect_width_nm && !(*c.defect_width_nm > 0.0)) {
        out.push_back({0, "grating.defect_width_nm must be > 0"});
    }
    if (c.polarization != "x" && c.polarization != "y") {
        out.push_back({0, "grating.polarization must be x or y"});
    }
    if (c.delta_n && *c.delta_n < 0.0) {
        out.push_back({0, "grating.delta_n must be >= 0"});
    }
    if (c.slat_loss && !(*c.slat_loss > 0.0 && *c.slat_loss <= 1.0)) {
        out.push_back({0, "grating.slat_loss must be in (0,1]"});
    }
    if (!(c.target_lambda_res_nm > 0.0)) {
        out.push_back({0, "grating.target_lambda_res_nm must be > 0"});
    }
    if (!(c.target_stopband_nm > 0.0)) {
        out.push_back({0, "grating.target_stopband_nm must be > 0"});
    }
    if (c.target_kappa_sc_ghz < 0.0) {
        out.push_back({0, "grating.target_kappa_sc_ghz must be >= 0"});
    }

    if (!(c.gamma_ghz > 0.0)) out.push_back({0, "emitter.gamma_ghz must be > 0"});
    if (!(c.beta0 >= 0.0 && c.beta0 <= 1.0)) {
        out.push_back({0, "emitter.beta0 must be in [0,1]"});
    }
    if (!(c.purcell >= 0.0)) out.push_back({0, "emitter.purcell must be >= 0"});
    if (c.radial_offset_nm < 0.0) {
        out.push_back({0, "emitter.radial_offset_nm must be >= 0"});
    }
    if (c.pol_axis != "x" && c.pol_axis != "y" && c.pol_axis != "z" &&
        c.pol_axis != "in-plane") {
        out.push_back({0, "emitter.pol_axis must be x, y, z or in-plane"});
    }

    if (!(c.grid_hi_nm > c.grid_lo_nm)) {
        out.push_back({0, "spectrum grid_hi_nm must exceed grid_lo_nm"});
    }
    if (!(c.coarse_step_nm > 0.0) || !(c.fine_step_nm > 0.0)) {
        out.push_back({0, "spectrum steps must be > 0"});
    }

    if (!(c.sweep_step > 0.0)) out.push_back({0, "sweep.step must be > 0"});
    if (c.formats != "csv" && c.formats != "json" && c.formats != "both") {
        out.push_back({0, "output.formats must be csv, json or both"});
    }
}

} // namespace

LayeredFiberGeometry RunConfig::geometry() const {
    LayeredFiberGeometry g;
    g.d_in_nm = d_in_nm;
    g.d_out_nm = d_out_nm;
    g.core = OpticalMaterial::from_name(core_material);
    g.shell = OpticalMaterial::from_name(shell_material);
    g.cladding = OpticalMaterial::from_name(cladding_material);
    return g;
}

EmitterSpec RunConfig::emitter() const {
    EmitterSpec e;
    e.gamma_ghz = gamma_ghz;
    e.beta0 = beta0;
    e.lambda_emit_nm = target_lambda_res_nm;
    return e;
}

ScanGrid RunConfig::scan_grid() const {
    ScanGrid g;
    g.lo_nm = grid_lo_nm;
    g.hi_nm = grid_hi_nm;
    g.coarse_step_nm = coarse_step_nm;
    g.fine_step_nm = fine_step_nm;
    return g;
}

PolarizationAxis RunConfig::emitter_axis() const {
    if (pol_axis == "x") return PolarizationAxis::X;
    if (pol_axis == "z") return PolarizationAxis::Z;
    if (pol_axis == "in-plane") return PolarizationAxis::InPlane;
    return PolarizationAxis::Y;
}

GratingCavitySpec RunConfig::grating_template() const {
    GratingCavitySpec s;
    s.period_nm = period_nm;
    s.duty_cycle = duty_cycle;
    s.slat_count = slat_count;
    s.defect_width_nm = defect_width();
    s.slat_height_um = slat_height_um;
    s.polarization = polarization == "x" ? Polarization::X : Polarization::Y;
    s.delta_n = delta_n.value_or(0.0);
    s.base_n_eff = base_n_eff.value_or(0.0);
    s.slat_loss = slat_loss.value_or(1.0);
    return s;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::vector<ConfigViolation> violations;

    bool any_content = false;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const size_t hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        any_content = true;

        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            violations.push_back({line_no, "expected 'key = value'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            violations.push_back({line_no, "empty key"});
            continue;
        }
        const KeyDef* def = find_key(key);
        if (def == nullptr) {
            violations.push_back({line_no, "unknown key '" + key + "'"});
            continue;
        }
        Ctx ctx{&cfg, &violations, line_no};
        def->set(ctx, value);
    }

    if (!any_content) {
        throw ConfigError({{1, "empty config"}});
    }
    validate(cfg, violations);
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_config(const RunConfig& config) {
    std::string out;
    for (const auto& key : key_table()) {
        out += key.name;
        out += " = ";
        out += key.get(config);
        out += '\n';
    }
    return out;
}

std::uint64_t config_hash(const RunConfig& config) {
    const std::string canon = canonical_config(config);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace capcav

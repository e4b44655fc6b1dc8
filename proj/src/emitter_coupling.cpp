#include "capcav/emitter_coupling.hpp"

#include <cmath>

#include "capcav/constants.hpp"
#include "capcav/errors.hpp"

namespace capcav {

void EmitterPlacement::validate() const {
    if (radial_offset_nm < 0.0) {
        throw DomainError("radial offset must be non-negative");
    }
    if (theta_rad < 0.0 || theta_rad > kPi / 2.0) {
        throw DomainError("theta must be in [0, pi/2]");
    }
}

void CouplingSurrogate::validate() const {
    for (double v : {eta_anti_y, eta_anti_x, eta_node_y, eta_node_x, eta_z_floor}) {
        if (v < 0.0 || v > 1.0) throw DomainError("efficiencies must be in [0,1]");
    }
    if (eta_anti_y < eta_node_y || eta_anti_x < eta_node_x) {
        throw DomainError("anti-node efficiency must not be below node efficiency");
    }
    if (!(standing_period_nm > 0.0)) {
        throw DomainError("standing period must be positive");
    }
}

CouplingSurrogate CouplingSurrogate::paper_centered() {
    return CouplingSurrogate{0.87, 0.71, 0.01, 0.03, 0.02, 244.0};
}

CouplingSurrogate CouplingSurrogate::paper_off_center() {
    return CouplingSurrogate{0.85, 0.71, 0.02, 0.07, 0.04, 244.0};
}

double eta_of_position(const EmitterPlacement& placement,
                       const CouplingSurrogate& model) {
    placement.validate();
    model.validate();
    if (placement.pol_axis == PolarizationAxis::Z) return model.eta_z_floor;

    const double c = std::cos(kPi * placement.delta_z_nm /
                              model.standing_period_nm);
    const double standing = c * c;
    const double eta_y =
        model.eta_node_y + (model.eta_anti_y - model.eta_node_y) * standing;
    const double eta_x =
        model.eta_node_x + (model.eta_anti_x - model.eta_node_x) * standing;
    switch (placement.pol_axis) {
        case PolarizationAxis::Y:
            return eta_y;
        case PolarizationAxis::X:
            return eta_x;
        case PolarizationAxis::InPlane:
            return eta_of_orientation(placement.theta_rad, eta_y, eta_x);
        case PolarizationAxis::Z:
            break;
    }
    return model.eta_z_floor;
}

double eta_of_orientation(double theta_rad, double eta_y, double eta_x) {
    if (theta_rad < 0.0 || theta_rad > kPi / 2.0) {
        throw DomainError("theta must be in [0, pi/2]");
    }
    const double c = std::cos(theta_rad), s = std::sin(theta_rad);
    return eta_y * c * c + eta_x * s * s;
}

PositionSweep position_sweep(const CouplingSurrogate& model, double z_lo_nm,
                             double z_hi_nm, double step_nm,
                             PolarizationAxis pol) {
    if (!(step_nm > 0.0)) throw DomainError("sweep step must be positive");
    model.validate();

    PositionSweep out;
    EmitterPlacement p;
    p.pol_axis = pol;
    for (double z = z_lo_nm; z < z_hi_nm; z += step_nm) {
        p.delta_z_nm = z;
        out.points.push_back({z, eta_of_position(p, model)});
    }
    // Interior strict extrema, plus the start point when the curve falls or
    // rises away from it. A final ascending/descending run peaks outside the
    // half-open domain and is not counted.
    const size_t n = out.points.size();
    auto eta = [&](size_t i) { return out.points[i].eta; };
    if (n >= 2) {
        if (eta(0) > eta(1)) out.maxima_nm.push_back(out.points[0].delta_z_nm);
        if (eta(0) < eta(1)) out.minima_nm.push_back(out.points[0].delta_z_nm);
    }
    for (size_t i = 1; i + 1 < n; ++i) {
        if (eta(i) > eta(i - 1) && eta(i) > eta(i + 1)) {
            out.maxima_nm.push_back(out.points[i].delta_z_nm);
        } else if (eta(i) < eta(i - 1) && eta(i) < eta(i + 1)) {
            out.minima_nm.push_back(out.points[i].delta_z_nm);
        }
    }
    return out;
}

} // namespace capcav

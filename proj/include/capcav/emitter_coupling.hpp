#pragma once

#include <vector>

namespace capcav {

enum class PolarizationAxis { X, Y, Z, InPlane };

// Emitter placement inside the cavity: axial offset from the defect center,
// radial offset from the fiber axis, and in-plane orientation angle
// (theta = 0 is y-polarized, pi/2 is x-polarized).
struct EmitterPlacement {
    double delta_z_nm = 0.0;
    double radial_offset_nm = 0.0;
    double theta_rad = 0.0;
    PolarizationAxis pol_axis = PolarizationAxis::Y;

    void validate() const;
};

// Standing-wave / orientation surrogate fitted to the anti-node and node
// channeling efficiencies.
struct CouplingSurrogate {
    double eta_anti_y = 0.87;
    double eta_anti_x = 0.71;
    double eta_node_y = 0.01;
    double eta_node_x = 0.03;
    double eta_z_floor = 0.02;
    double standing_period_nm = 244.0; // anti-node to anti-node

    void validate() const;

    // Emitter on the fiber axis (paper values).
    static CouplingSurrogate paper_centered();
    // Emitter displaced 50 nm off-axis (paper values).
    static CouplingSurrogate paper_off_center();
};

// eta(delta_z) = eta_node + (eta_anti - eta_node) cos^2(pi dz / period) for
// x/y polarization; the z-polarized floor is position-independent.
double eta_of_position(const EmitterPlacement& placement,
                       const CouplingSurrogate& model);

// Malus mixing of the two in-plane polarizations:
// eta(theta) = eta_y cos^2(theta) + eta_x sin^2(theta).
double eta_of_orientation(double theta_rad, double eta_y, double eta_x);

struct PositionSweepPoint {
    double delta_z_nm;
    double eta;
};

struct PositionSweep {
    std::vector<PositionSweepPoint> points;
    std::vector<double> maxima_nm; // locations of local efficiency maxima
    std::vector<double> minima_nm;
};

// Tabulates eta over delta_z in [z_lo, z_hi) with the given step and reports
// extrema locations. The end point is exclusive: the pattern repeats each
// standing period, so a closed interval would duplicate the first anti-node.
PositionSweep position_sweep(const CouplingSurrogate& model, double z_lo_nm,
                             double z_hi_nm, double step_nm,
                             PolarizationAxis pol);

} // namespace capcav

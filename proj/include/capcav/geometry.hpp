#pragma once

#include "capcav/materials.hpp"

namespace capcav {

// Three concentric dielectric layers: liquid core (radius d_in/2), glass
// shell (outer radius d_out/2), and an unbounded cladding medium.
// d_in = 0 collapses the structure to a two-layer rod.
struct LayeredFiberGeometry {
    double d_in_nm = 125.0;
    double d_out_nm = 515.0;
    OpticalMaterial core = OpticalMaterial::from_name("water");
    OpticalMaterial shell = OpticalMaterial::from_name("silica");
    OpticalMaterial cladding = OpticalMaterial::from_name("vacuum");

    // Throws DomainError unless 0 <= d_in < d_out and d_out > 0.
    void validate() const;
};

} // namespace capcav

#include "capcav/materials.hpp"

#include <cmath>

#include "capcav/errors.hpp"

namespace capcav {

namespace {

// Malitson 1965, fused silica at 20 C.
const Sellmeier kSilicaSellmeier{
    {0.6961663, 0.4079426, 0.8974794, 0.0},
    {0.0684043 * 0.0684043, 0.1162414 * 0.1162414, 9.896161 * 9.896161, 0.0}};

// Daimon & Masumura 2007, water at 20 C.
const Sellmeier kWaterSellmeier{
    {5.684027565e-1, 1.726177391e-1, 2.086189578e-2, 1.130748688e-1},
    {5.101829712e-3, 1.821153936e-2, 2.620722293e-2, 1.069792721e1}};

double sellmeier_n2(const Sellmeier& s, double lambda_um) {
    const double l2 = lambda_um * lambda_um;
    double n2 = 1.0;
    for (int i = 0; i < 4; ++i) {
        if (s.b[i] != 0.0) n2 += s.b[i] * l2 / (l2 - s.c[i]);
    }
    return n2;
}

} // namespace

OpticalMaterial OpticalMaterial::fixed(std::string name, double n) {
    OpticalMaterial m;
    m.name = std::move(name);
    m.index_model = n;
    return m;
}

OpticalMaterial OpticalMaterial::from_name(const std::string& name) {
    // Fixed working-point indices are the defaults; Sellmeier variants are
    // opt-in so that tests stay deterministic.
    if (name == "vacuum" || name == "air") return fixed(name, 1.0);
    if (name == "water") return fixed(name, 1.333);
    if (name == "silica") return fixed(name, 1.457);
    if (name == "silica_sellmeier") {
        OpticalMaterial m;
        m.name = name;
        m.index_model = kSilicaSellmeier;
        return m;
    }
    if (name == "water_sellmeier") {
        OpticalMaterial m;
        m.name = name;
        m.index_model = kWaterSellmeier;
        return m;
    }
    throw DomainError("unknown material name: " + name);
}

double refractive_index(const OpticalMaterial& material, double wavelength_nm) {
    if (wavelength_nm < kMinWavelengthNm || wavelength_nm > kMaxWavelengthNm) {
        throw DomainError("wavelength " + std::to_string(wavelength_nm) +
                          " nm outside supported range [400, 1000] nm");
    }
    double n = 0.0;
    if (const double* fixed = std::get_if<double>(&material.index_model)) {
        n = *fixed;
    } else {
        n = std::sqrt(sellmeier_n2(std::get<Sellmeier>(material.index_model),
                                   wavelength_nm * 1e-3));
    }
    if (!(n >= 1.0)) {
        throw DomainError("material '" + material.name +
                          "' evaluates to index < 1 at " +
                          std::to_string(wavelength_nm) + " nm");
    }
    return n;
}

} // namespace capcav

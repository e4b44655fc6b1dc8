#pragma once

#include <array>
#include <string>
#include <variant>

namespace capcav {

// Wavelength range over which material models are trusted, nm.
inline constexpr double kMinWavelengthNm = 400.0;
inline constexpr double kMaxWavelengthNm = 1000.0;

// Sellmeier model with up to four terms,
// n^2(lambda) = 1 + sum_i B_i lambda^2 / (lambda^2 - C_i),
// lambda in um, C_i in um^2. Unused terms have B_i = 0.
struct Sellmeier {
    std::array<double, 4> b{};
    std::array<double, 4> c{};
};

// A dielectric described either by a fixed index at the working wavelength
// or by a Sellmeier coefficient set.
struct OpticalMaterial {
    std::string name;
    std::variant<double, Sellmeier> index_model = 1.0;

    static OpticalMaterial fixed(std::string name, double n);

    // Built-in presets, addressable by the names used in config files:
    // "vacuum", "water", "silica", "water_sellmeier", "silica_sellmeier".
    static OpticalMaterial from_name(const std::string& name);
};

// Evaluates the refractive index at the given wavelength.
// Throws DomainError outside [400, 1000] nm and if the evaluated index
// drops below 1.
double refractive_index(const OpticalMaterial& material, double wavelength_nm);

} // namespace capcav

#include "capcav/bessel.hpp"

#include <cmath>
#include <cstdlib>

namespace capcav {

double bessel_j(int m, double x) {
    const double v = std::cyl_bessel_j(static_cast<double>(std::abs(m)), x);
    return (m < 0 && (m & 1)) ? -v : v;
}

double bessel_y(int m, double x) {
    const double v = std::cyl_neumann(static_cast<double>(std::abs(m)), x);
    return (m < 0 && (m & 1)) ? -v : v;
}

double bessel_i(int m, double x) {
    return std::cyl_bessel_i(static_cast<double>(std::abs(m)), x);
}

double bessel_k(int m, double x) {
    return std::cyl_bessel_k(static_cast<double>(std::abs(m)), x);
}

double bessel_j_prime(int m, double x) {
    return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x));
}

double bessel_y_prime(int m, double x) {
    return 0.5 * (bessel_y(m - 1, x) - bessel_y(m + 1, x));
}

double bessel_i_prime(int m, double x) {
    return 0.5 * (bessel_i(m - 1, x) + bessel_i(m + 1, x));
}

double bessel_k_prime(int m, double x) {
    return -0.5 * (bessel_k(m - 1, x) + bessel_k(m + 1, x));
}

} // namespace capcav

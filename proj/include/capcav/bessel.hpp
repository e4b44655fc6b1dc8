#pragma once

namespace capcav {

// Integer-order cylinder functions and first derivatives with respect to the
// argument. Negative orders are mapped through the usual reflection
// identities so that derivative recurrences work down to m = 0.
double bessel_j(int m, double x);
double bessel_y(int m, double x);
double bessel_i(int m, double x);
double bessel_k(int m, double x);

double bessel_j_prime(int m, double x);
double bessel_y_prime(int m, double x);
double bessel_i_prime(int m, double x);
double bessel_k_prime(int m, double x);

} // namespace capcav

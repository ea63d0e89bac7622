#include "minimod/stencil.hpp"

#include <cmath>

namespace minimod {
namespace {

// Gaussian elimination with partial pivoting; matrices here are at most 8x8.
std::vector<double> solve_dense(std::vector<long double> a, std::vector<long double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(static_cast<double>(a[r * n + col])) >
                std::fabs(static_cast<double>(a[piv * n + col])))
                piv = r;
        for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < n; ++r) {
            const long double f = a[r * n + col] / a[col * n + col];
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        long double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = static_cast<double>(s / a[r * n + r]);
    }
    return x;
}

long double factorial(int n) {
    long double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void check_radius(int radius) {
    if (radius < 1 || radius > 8)
        throw ConfigError("stencil radius must be in [1, 8], got " + std::to_string(radius));
}

void check_spacing(double h) {
    if (!(h > 0.0)) throw ConfigError("stencil spacing must be > 0");
}

} // namespace

StencilCoeffs second_derivative_coeffs(int radius, double h) {
    check_radius(radius);
    check_spacing(h);
    // Taylor system on unit spacing: the symmetric tap m contributes
    // 2 * m^(2k) / (2k)! to the 2k-th derivative; demand delta_{k,1}.
    const int n = radius;
    std::vector<long double> a(n * n), b(n, 0.0L);
    b[0] = 1.0L;
    for (int k = 1; k <= n; ++k)
        for (int m = 1; m <= n; ++m)
            a[(k - 1) * n + (m - 1)] = 2.0L * powl(static_cast<long double>(m), 2 * k) /
                                       factorial(2 * k);
    StencilCoeffs s;
    s.radius = radius;
    s.spacing = h;
    s.kind = StencilKind::SecondDerivativeCollocated;
    s.c = solve_dense(std::move(a), std::move(b), n);
    double sum = 0.0;
    for (double& cm : s.c) {
        cm /= h * h;
        sum += cm;
    }
    s.center = -2.0 * sum;
    return s;
}

StencilCoeffs staggered_first_derivative_coeffs(int radius, double h) {
    check_radius(radius);
    check_spacing(h);
    // Antisymmetric taps at half-integer nodes x_m = m - 1/2; tap m contributes
    // 2 * x_m^(2k-1) / (2k-1)! to the (2k-1)-th derivative.
    const int n = radius;
    std::vector<long double> a(n * n), b(n, 0.0L);
    b[0] = 1.0L;
    for (int k = 1; k <= n; ++k)
        for (int m = 1; m <= n; ++m) {
            const long double xm = static_cast<long double>(m) - 0.5L;
            a[(k - 1) * n + (m - 1)] = 2.0L * powl(xm, 2 * k - 1) / factorial(2 * k - 1);
        }
    StencilCoeffs s;
    s.radius = radius;
    s.spacing = h;
    s.kind = StencilKind::FirstDerivativeStaggered;
    s.c = solve_dense(std::move(a), std::move(b), n);
    for (double& cm : s.c) cm /= h;
    s.center = 0.0;
    return s;
}

StencilCoeffs central_first_derivative_coeffs(int radius, double h) {
    check_radius(radius);
    check_spacing(h);
    const int n = radius;
    std::vector<long double> a(n * n), b(n, 0.0L);
    b[0] = 1.0L;
    for (int k = 1; k <= n; ++k)
        for (int m = 1; m <= n; ++m)
            a[(k - 1) * n + (m - 1)] = 2.0L * powl(static_cast<long double>(m), 2 * k - 1) /
                                       factorial(2 * k - 1);
    StencilCoeffs s;
    s.radius = radius;
    s.spacing = h;
    s.kind = StencilKind::FirstDerivativeCollocated;
    s.c = solve_dense(std::move(a), std::move(b), n);
    for (double& cm : s.c) cm /= h;
    s.center = 0.0;
    return s;
}

} // namespace minimod

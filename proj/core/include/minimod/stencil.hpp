#pragma once

#include <array>
#include <vector>

#include "minimod/grid.hpp"

namespace minimod {

enum class StencilKind {
    SecondDerivativeCollocated,
    FirstDerivativeStaggered,
    FirstDerivativeCollocated,
};

/// One-axis finite-difference weights, spacing already folded in
/// (1/h^2 for second derivatives, 1/h for first derivatives), so
/// application is pure multiply-add.
struct StencilCoeffs {
    int radius = 4;
    double spacing = 1.0;
    StencilKind kind = StencilKind::SecondDerivativeCollocated;
    std::vector<double> c; // c[m-1] for taps m = 1..radius
    double center = 0.0;   // second-derivative center weight = -2 * sum(c)
};

/// Collocated second-derivative weights of order 2*radius, derived from the
/// Taylor system at startup (never hard-coded literals).
StencilCoeffs second_derivative_coeffs(int radius, double h);

/// Staggered first-derivative weights sampling at half-integer offsets
/// +-(m-1/2)h; order 2*radius (exact for monomials to degree 2*radius-1).
StencilCoeffs staggered_first_derivative_coeffs(int radius, double h);

/// Collocated central first derivative (needed by the CPML recursion of the
/// collocated propagator); antisymmetric, exact for monomials to degree 2*radius.
StencilCoeffs central_first_derivative_coeffs(int radius, double h);

/// Weights narrowed to the field scalar type for kernel inner loops.
template <typename T>
struct AxisWeights {
    int radius = 0;
    T center = T(0);
    std::array<T, 8> c{};

    AxisWeights() = default;
    explicit AxisWeights(const StencilCoeffs& s) : radius(s.radius), center(static_cast<T>(s.center)) {
        for (int m = 0; m < s.radius; ++m) c[m] = static_cast<T>(s.c[m]);
    }
};

enum class DerivDir { Forward, Backward };

/// out(i,j,k) = sum over axes of sum_m c_m [p(+m) + p(-m) - 2 p(0)] on `box`;
/// points outside the box are untouched. Per-axis subtotals are accumulated
/// first, then summed x + y + z (fixed order, relied on for bitwise checks).
template <typename T>
void apply_laplacian(const FieldT<T>& p, const StencilCoeffs& cx, const StencilCoeffs& cy,
                     const StencilCoeffs& cz, FieldT<T>& out, const IndexBox& box);

/// Staggered first derivative along `axis`. Forward differentiates at +1/2
/// (cell values -> face location), backward at -1/2 (face -> cell), so that
/// the D / D^t pairing of the elastic operator uses opposite shifts.
template <typename T>
void apply_staggered_derivative(const FieldT<T>& f, int axis, DerivDir dir,
                                const StencilCoeffs& coeffs, FieldT<T>& out, const IndexBox& box);

// ---- inline kernels shared with the propagators ----

template <typename T>
inline T laplacian_at(const T* p, std::size_t sx, std::size_t sy, const AxisWeights<T>& wx,
                      const AxisWeights<T>& wy, const AxisWeights<T>& wz) {
    const T c = p[0];
    T tx = T(0), ty = T(0), tz = T(0);
    for (int m = 1; m <= wx.radius; ++m)
        tx += wx.c[m - 1] * (p[m * sx] + p[-static_cast<long long>(m) * sx] - T(2) * c);
    for (int m = 1; m <= wy.radius; ++m)
        ty += wy.c[m - 1] * (p[m * sy] + p[-static_cast<long long>(m) * sy] - T(2) * c);
    for (int m = 1; m <= wz.radius; ++m)
        tz += wz.c[m - 1] * (p[m] + p[-m] - T(2) * c);
    return tx + ty + tz;
}

/// Single-axis second-derivative term of the Laplacian (stride s along axis).
template <typename T>
inline T second_derivative_at(const T* p, long long s, const AxisWeights<T>& w) {
    const T c = p[0];
    T t = T(0);
    for (int m = 1; m <= w.radius; ++m) t += w.c[m - 1] * (p[m * s] + p[-m * s] - T(2) * c);
    return t;
}

/// Collocated antisymmetric first derivative (stride s along axis).
template <typename T>
inline T central_derivative_at(const T* p, long long s, const AxisWeights<T>& w) {
    T t = T(0);
    for (int m = 1; m <= w.radius; ++m) t += w.c[m - 1] * (p[m * s] - p[-m * s]);
    return t;
}

/// Staggered first derivative at +1/2 (Forward) or -1/2 (Backward).
template <typename T>
inline T staggered_derivative_at(const T* f, long long s, const AxisWeights<T>& w, DerivDir dir) {
    T t = T(0);
    if (dir == DerivDir::Forward) {
        for (int m = 1; m <= w.radius; ++m) t += w.c[m - 1] * (f[m * s] - f[(1 - m) * s]);
    } else {
        for (int m = 1; m <= w.radius; ++m) t += w.c[m - 1] * (f[(m - 1) * s] - f[-m * s]);
    }
    return t;
}

template <typename T>
void apply_laplacian(const FieldT<T>& p, const StencilCoeffs& cx, const StencilCoeffs& cy,
                     const StencilCoeffs& cz, FieldT<T>& out, const IndexBox& box) {
    if (!p.grid.interior().contains(box))
        throw std::invalid_argument("apply_laplacian: box exceeds grid interior");
    const AxisWeights<T> wx(cx), wy(cy), wz(cz);
    const std::size_t sx = p.grid.stride_x(), sy = p.grid.stride_y();
    for (int i = box.lo[0]; i < box.hi[0]; ++i)
        for (int j = box.lo[1]; j < box.hi[1]; ++j) {
            const T* src = &p.data[p.grid.offset(i, j, box.lo[2])];
            T* dst = &out.data[out.grid.offset(i, j, box.lo[2])];
            for (int k = box.lo[2]; k < box.hi[2]; ++k, ++src, ++dst)
                *dst = laplacian_at(src, sx, sy, wx, wy, wz);
        }
}

template <typename T>
void apply_staggered_derivative(const FieldT<T>& f, int axis, DerivDir dir,
                                const StencilCoeffs& coeffs, FieldT<T>& out, const IndexBox& box) {
    if (!f.grid.interior().contains(box))
        throw std::invalid_argument("apply_staggered_derivative: box exceeds grid interior");
    const AxisWeights<T> w(coeffs);
    const long long s = axis == 0 ? static_cast<long long>(f.grid.stride_x())
                       : axis == 1 ? static_cast<long long>(f.grid.stride_y())
                                   : 1;
    for (int i = box.lo[0]; i < box.hi[0]; ++i)
        for (int j = box.lo[1]; j < box.hi[1]; ++j) {
            const T* src = &f.data[f.grid.offset(i, j, box.lo[2])];
            T* dst = &out.data[out.grid.offset(i, j, box.lo[2])];
            for (int k = box.lo[2]; k < box.hi[2]; ++k, ++src, ++dst)
                *dst = staggered_derivative_at(src, s, w, dir);
        }
}

} // namespace minimod

#pragma once

#include <cmath>
#include <vector>

#include "minimod/grid.hpp"

namespace minimod {

/// Per-axis CPML recurrence coefficients, tabulated per global interior index
/// so damping-region kernels can look them up by coordinate. Outside the
/// damping layer b = 1 and a = 0, which makes the memory variables inert.
template <typename T>
struct AxisCpml {
    std::vector<T> a, b, inv_kappa; // length n along the axis
    std::vector<double> d, alpha;   // grading, for inspection and tests
};

template <typename T>
struct CpmlProfileT {
    std::array<AxisCpml<T>, 3> axis;
    std::array<int, 3> ndamping{0, 0, 0};
    double d0[3] = {0.0, 0.0, 0.0}; // peak damping per axis, 1/s
};

using CpmlProfile = CpmlProfileT<float>;

/// Quadratic grading d(xi) = d0 (xi/L)^2 with d0 = -3 vmax ln(R)/(2L),
/// L = ndamping * h; alpha linear from pi*fmax at the interior edge to 0 at
/// the outer boundary; kappa == 1. Recurrence: b = exp(-(d/kappa + alpha) dt),
/// a = d (b - 1) / (kappa (d + kappa alpha)), a = 0 where d = 0.
/// `n` and `h` describe the global grid. With free_surface the z-lo side is
/// left undamped.
template <typename T>
CpmlProfileT<T> build_profile(std::array<int, 3> n, std::array<double, 3> h,
                              std::array<int, 3> ndamping, double fmax, double vmax, double dt,
                              double r_target = 1e-3, bool free_surface = false) {
    if (!(r_target > 0.0 && r_target < 1.0))
        throw ConfigError("CPML reflection target must be in (0, 1)");
    CpmlProfileT<T> p;
    p.ndamping = ndamping;
    const double alpha_max = M_PI * fmax;
    for (int ax = 0; ax < 3; ++ax) {
        AxisCpml<T>& A = p.axis[ax];
        const int count = n[ax];
        A.a.assign(count, T(0));
        A.b.assign(count, T(1));
        A.inv_kappa.assign(count, T(1));
        A.d.assign(count, 0.0);
        A.alpha.assign(count, 0.0);
        const int nd = ndamping[ax];
        if (nd < 1) continue;
        const double L = nd * h[ax];
        p.d0[ax] = -3.0 * vmax * std::log(r_target) / (2.0 * L);
        auto grade = [&](int idx, double depth_frac) {
            // depth_frac in (0, 1]: 0 at the interior edge, 1 at the boundary
            const double d = p.d0[ax] * depth_frac * depth_frac;
            const double alpha = alpha_max * (1.0 - depth_frac);
            A.d[idx] = d;
            A.alpha[idx] = alpha;
            const double b = std::exp(-(d + alpha) * dt);
            A.b[idx] = static_cast<T>(b);
            A.a[idx] = d > 0.0 ? static_cast<T>(d * (b - 1.0) / (d + alpha)) : T(0);
        };
        for (int m = 0; m < nd; ++m) {
            const double depth = static_cast<double>(nd - m) / nd;
            if (!(ax == 2 && free_surface)) grade(m, depth);
            grade(count - 1 - m, depth);
        }
    }
    return p;
}

/// Dense array over an index box plus a zero halo of width `halo`; reads in
/// the halo return 0 until written. Backs the CPML memory variables, which
/// live only over the damping regions.
template <typename T>
struct BoxArray {
    IndexBox box;
    int halo = 0;
    std::array<int, 3> ext{0, 0, 0};
    std::vector<T> v;

    BoxArray() = default;
    BoxArray(const IndexBox& b, int halo_width) : box(b), halo(halo_width) {
        for (int a = 0; a < 3; ++a) ext[a] = (b.hi[a] - b.lo[a]) + 2 * halo;
        v.assign(static_cast<std::size_t>(ext[0]) * ext[1] * ext[2], T(0));
    }
    // global interior coordinates; valid within box +- halo
    std::size_t offset(int i, int j, int k) const {
        return (static_cast<std::size_t>(i - box.lo[0] + halo) * ext[1] +
                static_cast<std::size_t>(j - box.lo[1] + halo)) * ext[2] +
               static_cast<std::size_t>(k - box.lo[2] + halo);
    }
    T& at(int i, int j, int k) { return v[offset(i, j, k)]; }
    const T& at(int i, int j, int k) const { return v[offset(i, j, k)]; }
    std::size_t stride_x() const { return static_cast<std::size_t>(ext[1]) * ext[2]; }
    std::size_t stride_y() const { return static_cast<std::size_t>(ext[2]); }
};

/// Pressure free surface at the z = 0 plane: p = 0 on the plane, odd mirror
/// into the ghost cells so the stencil sees an antisymmetric continuation.
template <typename T>
void apply_free_surface_pressure(FieldT<T>& p) {
    const Grid3D& g = p.grid;
    for (int i = -g.radius; i < g.n[0] + g.radius; ++i)
        for (int j = -g.radius; j < g.n[1] + g.radius; ++j) {
            p.at(i, j, 0) = T(0);
            for (int m = 1; m <= g.radius; ++m) p.at(i, j, -m) = -p.at(i, j, m);
        }
}

/// Elastic free surface: zero normal and shear tractions on the z = 0 plane,
/// odd mirror into the ghosts.
template <typename T>
void apply_free_surface_stress(FieldT<T>& szz, FieldT<T>& sxz, FieldT<T>& syz) {
    apply_free_surface_pressure(szz);
    apply_free_surface_pressure(sxz);
    apply_free_surface_pressure(syz);
}

} // namespace minimod

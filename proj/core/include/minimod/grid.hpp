#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "minimod/errors.hpp"

namespace minimod {

/// Half-open index box [lo, hi) in 0-based interior coordinates.
struct IndexBox {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};

    bool empty() const {
        return hi[0] <= lo[0] || hi[1] <= lo[1] || hi[2] <= lo[2];
    }
    long long volume() const {
        if (empty()) return 0;
        return static_cast<long long>(hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    }
    bool contains(int i, int j, int k) const {
        return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2];
    }
    bool contains(const IndexBox& b) const {
        if (b.empty()) return true;
        return b.lo[0] >= lo[0] && b.hi[0] <= hi[0] && b.lo[1] >= lo[1] && b.hi[1] <= hi[1] &&
               b.lo[2] >= lo[2] && b.hi[2] <= hi[2];
    }
    friend bool operator==(const IndexBox&, const IndexBox&) = default;
};

inline IndexBox intersect(const IndexBox& a, const IndexBox& b) {
    IndexBox r;
    for (int ax = 0; ax < 3; ++ax) {
        r.lo[ax] = std::max(a.lo[ax], b.lo[ax]);
        r.hi[ax] = std::min(a.hi[ax], b.hi[ax]);
    }
    if (r.empty()) return IndexBox{};
    return r;
}

/// Uniform Cartesian grid. Interior points are indexed 0..n-1 per axis,
/// ghost shells of width `radius` extend the allocated array on every side.
/// Memory layout is contiguous with z fastest:
///   flat(i,j,k) = ((i+radius)*ey + (j+radius))*ez + (k+radius)
struct Grid3D {
    std::array<int, 3> n{0, 0, 0};          // interior points per axis
    std::array<double, 3> d{0.0, 0.0, 0.0}; // spacing in meters
    int radius = 4;                          // stencil halo width
    std::array<bool, 3> stagger{false, false, false}; // half-cell offset per axis

    int ext(int axis) const { return n[axis] + 2 * radius; }
    std::size_t volume() const {
        return static_cast<std::size_t>(ext(0)) * ext(1) * ext(2);
    }
    std::size_t stride_x() const { return static_cast<std::size_t>(ext(1)) * ext(2); }
    std::size_t stride_y() const { return static_cast<std::size_t>(ext(2)); }
    std::size_t offset(int i, int j, int k) const {
        return (static_cast<std::size_t>(i + radius) * ext(1) +
                static_cast<std::size_t>(j + radius)) * ext(2) +
               static_cast<std::size_t>(k + radius);
    }
    IndexBox interior() const { return IndexBox{{0, 0, 0}, {n[0], n[1], n[2]}}; }

    friend bool operator==(const Grid3D&, const Grid3D&) = default;
};

Grid3D make_grid(std::array<int, 3> n, std::array<double, 3> d, int radius = 4,
                 std::array<bool, 3> stagger = {false, false, false});

/// One scalar wavefield component over the allocated extent of a Grid3D.
template <typename T>
struct FieldT {
    Grid3D grid;
    std::string name;
    std::vector<T> data;

    FieldT() = default;
    FieldT(const Grid3D& g, std::string component)
        : grid(g), name(std::move(component)), data(g.volume(), T(0)) {}

    T& at(int i, int j, int k) { return data[grid.offset(i, j, k)]; }
    const T& at(int i, int j, int k) const { return data[grid.offset(i, j, k)]; }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }
    void zero() { fill(T(0)); }
};

using Field = FieldT<float>;

/// Replicate interior edge values into the ghost shells (used for material
/// volumes so stencil loops never branch on the boundary).
template <typename T>
void fill_ghosts_replicate(FieldT<T>& f) {
    const Grid3D& g = f.grid;
    const int r = g.radius;
    auto clamp = [](int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); };
    for (int i = -r; i < g.n[0] + r; ++i)
        for (int j = -r; j < g.n[1] + r; ++j)
            for (int k = -r; k < g.n[2] + r; ++k) {
                if (i >= 0 && i < g.n[0] && j >= 0 && j < g.n[1] && k >= 0 && k < g.n[2])
                    continue;
                f.at(i, j, k) = f.at(clamp(i, g.n[0]), clamp(j, g.n[1]), clamp(k, g.n[2]));
            }
}

/// Disjoint cover of the interior: an inner box plus six damping slabs.
/// X slabs take full y/z cross sections, Y slabs full z, matching the
/// wavefield-solution loop structure.
struct RegionPartition {
    IndexBox inner;
    enum Slab { XLo = 0, XHi, YLo, YHi, ZLo, ZHi };
    std::array<IndexBox, 6> slabs;
};

RegionPartition partition_regions(const Grid3D& grid, std::array<int, 3> ndamping);

} // namespace minimod

#include "minimod/grid.hpp"

namespace minimod {

Grid3D make_grid(std::array<int, 3> n, std::array<double, 3> d, int radius,
                 std::array<bool, 3> stagger) {
    static const char* axis_name[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        if (n[a] < 1)
            throw ConfigError(std::string("grid size must be >= 1 along ") + axis_name[a] +
                              ", got " + std::to_string(n[a]));
        if (!(d[a] > 0.0))
            throw ConfigError(std::string("grid spacing must be > 0 along ") + axis_name[a]);
    }
    if (radius < 1) throw ConfigError("stencil radius must be >= 1");
    Grid3D g;
    g.n = n;
    g.d = d;
    g.radius = radius;
    g.stagger = stagger;
    return g;
}

RegionPartition partition_regions(const Grid3D& grid, std::array<int, 3> nd) {
    static const char* axis_name[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        if (nd[a] < 0) throw ConfigError("ndamping must be >= 0");
        if (2 * nd[a] >= grid.n[a])
            throw ConfigError(std::string("damping layers too thick along ") + axis_name[a] +
                              ": 2*" + std::to_string(nd[a]) + " >= " + std::to_string(grid.n[a]));
    }
    const int nx = grid.n[0], ny = grid.n[1], nz = grid.n[2];
    RegionPartition p;
    p.inner = IndexBox{{nd[0], nd[1], nd[2]}, {nx - nd[0], ny - nd[1], nz - nd[2]}};
    p.slabs[RegionPartition::XLo] = IndexBox{{0, 0, 0}, {nd[0], ny, nz}};
    p.slabs[RegionPartition::XHi] = IndexBox{{nx - nd[0], 0, 0}, {nx, ny, nz}};
    p.slabs[RegionPartition::YLo] = IndexBox{{nd[0], 0, 0}, {nx - nd[0], nd[1], nz}};
    p.slabs[RegionPartition::YHi] = IndexBox{{nd[0], ny - nd[1], 0}, {nx - nd[0], ny, nz}};
    p.slabs[RegionPartition::ZLo] = IndexBox{{nd[0], nd[1], 0}, {nx - nd[0], ny - nd[1], nd[2]}};
    p.slabs[RegionPartition::ZHi] =
        IndexBox{{nd[0], nd[1], nz - nd[2]}, {nx - nd[0], ny - nd[1], nz}};
    for (auto& s : p.slabs)
        if (s.empty()) s = IndexBox{};
    return p;
}

} // namespace minimod

#pragma once

#include <iosfwd>

#include "minimod/driver.hpp"
#include "minimod/transport.hpp"

namespace minimod {

/// Cartesian process grid px * py * pz with row-major rank order:
///   rank = (cx * py + cy) * pz + cz
struct CartTopology {
    std::array<int, 3> dims{1, 1, 1};

    int nranks() const { return dims[0] * dims[1] * dims[2]; }
    std::array<int, 3> coord_of(int rank) const {
        return {rank / (dims[1] * dims[2]), (rank / dims[2]) % dims[1], rank % dims[2]};
    }
    int rank_of(std::array<int, 3> c) const {
        return (c[0] * dims[1] + c[1]) * dims[2] + c[2];
    }
    /// Rank one step along `axis` (dir 0 = lower coordinate, 1 = higher);
    /// -1 past the domain edge (no periodic wrap).
    int neighbor(int rank, int axis, int dir) const {
        auto c = coord_of(rank);
        c[axis] += dir == 0 ? -1 : 1;
        if (c[axis] < 0 || c[axis] >= dims[axis]) return -1;
        return rank_of(c);
    }
};

CartTopology make_topology(std::array<int, 3> dims, int nranks);

/// 1-D block decomposition; the remainder goes to the low-coordinate parts
/// (100 over 3 -> 34, 33, 33).
struct AxisSlice {
    int offset = 0;
    int count = 0;
};
AxisSlice decompose(int n, int parts, int coord);

/// Global interior sub-box owned by `rank`.
IndexBox local_box(const CartTopology& topo, std::array<int, 3> n, int rank);

/// Exchange ghost layers of `f` with the six face neighbors: pack `radius`
/// interior layers per touching face, one message per face and direction.
/// Corner/edge ghosts are not exchanged; the axis-aligned stencils never
/// read them.
void exchange_halos(Transport& transport, const CartTopology& topo, std::array<int, 3> n,
                    int rank, Field& f, std::uint32_t step);

/// One rank of a distributed acoustic_iso_cd run. Every rank gets the full
/// SimConfig and global model and slices out its sub-box; traces from owned
/// receivers are gathered to rank 0 at the end, so only rank 0's ShotRecord
/// is complete. The domain cuts must stay clear of the damping layers
/// (offset >= ndamping + radius from either boundary per axis) so no CPML
/// memory-variable read ever crosses a rank boundary; with that constraint
/// the multi-rank wavefield is bit-identical to the single-rank one.
std::pair<ShotRecord, RunReport> run_distributed_rank(const SimConfig& config,
                                                      const EarthModel& model,
                                                      std::array<int, 3> dims,
                                                      Transport& transport,
                                                      std::ostream* progress = nullptr);

/// All ranks as threads of one process over an InProcHub; returns rank 0's
/// result. Reference executor for the socket path and the oracle for
/// multi-rank equivalence tests.
std::pair<ShotRecord, RunReport> run_distributed_inproc(const SimConfig& config,
                                                        const EarthModel& model,
                                                        std::array<int, 3> dims,
                                                        std::ostream* progress = nullptr);

} // namespace minimod

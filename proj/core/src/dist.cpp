#include "minimod/dist.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <thread>

namespace minimod {

CartTopology make_topology(std::array<int, 3> dims, int nranks) {
    for (int ax = 0; ax < 3; ++ax)
        if (dims[ax] < 1) throw ConfigError("process grid dimensions must be >= 1");
    const long long prod = 1LL * dims[0] * dims[1] * dims[2];
    if (prod != nranks)
        throw ConfigError("process grid " + std::to_string(dims[0]) + "x" +
                          std::to_string(dims[1]) + "x" + std::to_string(dims[2]) +
                          " does not match the number of ranks (" + std::to_string(nranks) + ")");
    return CartTopology{dims};
}

AxisSlice decompose(int n, int parts, int coord) {
    if (parts < 1 || coord < 0 || coord >= parts)
        throw ConfigError("invalid decomposition coordinate");
    if (n < parts) throw ConfigError("cannot split " + std::to_string(n) + " points over " +
                                     std::to_string(parts) + " ranks");
    const int base = n / parts;
    const int rem = n % parts;
    AxisSlice s;
    s.count = base + (coord < rem ? 1 : 0);
    s.offset = coord * base + std::min(coord, rem);
    return s;
}

IndexBox local_box(const CartTopology& topo, std::array<int, 3> n, int rank) {
    const auto c = topo.coord_of(rank);
    IndexBox b;
    for (int ax = 0; ax < 3; ++ax) {
        const AxisSlice s = decompose(n[ax], topo.dims[ax], c[ax]);
        b.lo[ax] = s.offset;
        b.hi[ax] = s.offset + s.count;
    }
    return b;
}

namespace {

// Pack `radius` interior layers touching one face; cross-section spans the
// interior of the other two axes, z fastest.
std::vector<float> pack_face(const Field& f, int axis, int dir) {
    const Grid3D& g = f.grid;
    const int r = g.radius;
    int lo[3] = {0, 0, 0}, hi[3] = {g.n[0], g.n[1], g.n[2]};
    if (dir == 0)
        hi[axis] = r;
    else
        lo[axis] = g.n[axis] - r;
    std::vector<float> buf;
    buf.reserve(static_cast<std::size_t>(hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]));
    for (int i = lo[0]; i < hi[0]; ++i)
        for (int j = lo[1]; j < hi[1]; ++j)
            for (int k = lo[2]; k < hi[2]; ++k) buf.push_back(f.at(i, j, k));
    return buf;
}

void unpack_face(Field& f, int axis, int dir, const std::vector<float>& buf) {
    const Grid3D& g = f.grid;
    const int r = g.radius;
    int lo[3] = {0, 0, 0}, hi[3] = {g.n[0], g.n[1], g.n[2]};
    if (dir == 0) { // ghost layers below the interior
        lo[axis] = -r;
        hi[axis] = 0;
    } else {
        lo[axis] = g.n[axis];
        hi[axis] = g.n[axis] + r;
    }
    const std::size_t expect =
        static_cast<std::size_t>(hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    if (buf.size() != expect)
        throw std::runtime_error("halo message size mismatch: got " +
                                 std::to_string(buf.size()) + ", expected " +
                                 std::to_string(expect));
    std::size_t p = 0;
    for (int i = lo[0]; i < hi[0]; ++i)
        for (int j = lo[1]; j < hi[1]; ++j)
            for (int k = lo[2]; k < hi[2]; ++k) f.at(i, j, k) = buf[p++];
}

} // namespace

void exchange_halos(Transport& transport, const CartTopology& topo, std::array<int, 3> /*n*/,
                    int rank, Field& f, std::uint32_t step) {
    std::array<std::vector<float>, 6> sendbuf, recvbuf;
    for (int axis = 0; axis < 3; ++axis)
        for (int dir = 0; dir < 2; ++dir) {
            const int nbr = topo.neighbor(rank, axis, dir);
            if (nbr < 0) continue;
            auto& buf = sendbuf[axis * 2 + dir];
            buf = pack_face(f, axis, dir);
            // the neighbor receives this as its opposite-side ghost
            MsgHeader h{step, static_cast<std::uint32_t>(axis),
                        static_cast<std::uint32_t>(1 - dir),
                        static_cast<std::uint32_t>(buf.size())};
            transport.post_send(nbr, h, buf.data());
            transport.post_recv(nbr, static_cast<std::uint32_t>(axis),
                                static_cast<std::uint32_t>(dir), recvbuf[axis * 2 + dir]);
        }
    transport.wait_all();
    for (int axis = 0; axis < 3; ++axis)
        for (int dir = 0; dir < 2; ++dir) {
            if (topo.neighbor(rank, axis, dir) < 0) continue;
            unpack_face(f, axis, dir, recvbuf[axis * 2 + dir]);
        }
}

namespace {

void validate_cuts(const CartTopology& topo, std::array<int, 3> n, std::array<int, 3> ndamping,
                   int radius) {
    for (int ax = 0; ax < 3; ++ax) {
        const int keep = ndamping[ax] + radius;
        for (int c = 1; c < topo.dims[ax]; ++c) {
            const int cut = decompose(n[ax], topo.dims[ax], c).offset;
            if (cut < keep || cut > n[ax] - keep)
                throw ConfigError(
                    "rank boundary at index " + std::to_string(cut) +
                    " cuts through the damping region (must be >= " + std::to_string(keep) +
                    " points from either domain boundary)");
        }
    }
}

void progress_line(std::ostream* out, int step, int nsteps) {
    if (out && step % 100 == 0) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " time step %11d / %11d\n", step, nsteps);
        *out << buf << std::flush;
    }
}

} // namespace

std::pair<ShotRecord, RunReport> run_distributed_rank(const SimConfig& config,
                                                      const EarthModel& model,
                                                      std::array<int, 3> dims,
                                                      Transport& transport,
                                                      std::ostream* progress) {
    if (config.propagator != Propagator::AcousticIsoCd)
        throw ConfigError("distributed execution supports acoustic_iso_cd only");
    if (config.nsteps < 1) throw ConfigError("nsteps must be >= 1");
    if (model.grid.n != config.ngrid)
        throw ConfigError("model grid does not match configured ngrid");

    const Grid3D grid = make_grid(config.ngrid, config.dgrid, config.stencil_radius);
    const CartTopology topo = make_topology(dims, transport.nranks());
    validate_cuts(topo, grid.n, config.ndamping, grid.radius);

    const double dt = cfl_dt(model, grid, config.cfl);
    const Wavelet w = ricker(config.fmax, dt, config.nsteps);
    const AcquisitionGeometry geometry = build_geometry(config, grid);
    const TaskRunner runner = select_target(config);

    const int rank = transport.rank();
    const IndexBox box = local_box(topo, grid.n, rank);
    const std::array<int, 3> offset = box.lo;
    const std::array<int, 3> nloc = {box.hi[0] - box.lo[0], box.hi[1] - box.lo[1],
                                     box.hi[2] - box.lo[2]};
    const Grid3D lgrid = make_grid(nloc, config.dgrid, grid.radius);

    // Slice the rank-local velocity volume including ghosts; ghost reads of
    // the global field resolve to interior values across rank boundaries and
    // to the replicated shell at the domain edge, matching the single-rank
    // engine exactly.
    FieldT<float> vp_local(lgrid, "vp");
    const int r = lgrid.radius;
    for (int i = -r; i < nloc[0] + r; ++i)
        for (int j = -r; j < nloc[1] + r; ++j)
            for (int k = -r; k < nloc[2] + r; ++k)
                vp_local.at(i, j, k) = model.vp.at(i + offset[0], j + offset[1], k + offset[2]);

    EngineOptions opts;
    opts.ndamping = config.ndamping;
    opts.fmax = config.fmax;
    opts.r_target = config.r_target;
    opts.free_surface = config.free_surface;
    opts.taper = config.taper;
    opts.ntaper = config.ntaper;

    AcousticCdEngine<float> eng(lgrid, offset, grid.n, vp_local, opts,
                                static_cast<float>(dt), model.vmax);

    std::optional<std::array<int, 3>> src_local;
    const auto& s = geometry.source_loc;
    if (box.contains(s[0], s[1], s[2]))
        src_local = std::array<int, 3>{s[0] - offset[0], s[1] - offset[1], s[2] - offset[2]};

    std::vector<int> owned; // global receiver indices inside this rank's box
    for (int i = 0; i < geometry.nreceivers(); ++i) {
        const auto& loc = geometry.receivers[i];
        if (box.contains(loc[0], loc[1], loc[2])) owned.push_back(i);
    }

    ShotRecord rec = make_record(geometry, config.nsteps, dt);
    RunReport rep;
    rep.dt = dt;
    using Clock = std::chrono::steady_clock;
    const auto t_model = Clock::now();
    double kernel = 0.0;

    for (int n = 0; n < config.nsteps; ++n) {
        const auto t0 = Clock::now();
        exchange_halos(transport, topo, grid.n, rank, eng.pressure(),
                       static_cast<std::uint32_t>(n));
        eng.step(w.samples[n], src_local, runner);
        kernel += std::chrono::duration<double>(Clock::now() - t0).count();
        const Field& p = eng.pressure();
        for (int idx : owned) {
            const auto& loc = geometry.receivers[idx];
            rec.at(idx, n) = p.at(loc[0] - offset[0], loc[1] - offset[1], loc[2] - offset[2]);
        }
        if (!std::isfinite(p.at(nloc[0] / 2, nloc[1] / 2, nloc[2] / 2)))
            throw InstabilityError("non-finite wavefield sample on rank " + std::to_string(rank),
                                   n + 1);
        if (rank == 0) progress_line(progress, n + 1, config.nsteps);
        rep.steps_run = n + 1;
    }

    // Gather owned traces to rank 0: [indices..., traces...] as f32.
    const int nsteps = config.nsteps;
    if (rank != 0) {
        std::vector<float> payload;
        payload.reserve(owned.size() * (1 + static_cast<std::size_t>(nsteps)));
        for (int idx : owned) payload.push_back(static_cast<float>(idx));
        for (int idx : owned)
            for (int n = 0; n < nsteps; ++n) payload.push_back(rec.at(idx, n));
        MsgHeader h{static_cast<std::uint32_t>(nsteps), kGatherAxis, 0,
                    static_cast<std::uint32_t>(payload.size())};
        float dummy = 0.0f;
        transport.post_send(0, h, payload.empty() ? &dummy : payload.data());
        transport.wait_all();
    } else {
        std::vector<std::vector<float>> gathered(transport.nranks());
        for (int src_rank = 1; src_rank < transport.nranks(); ++src_rank)
            transport.post_recv(src_rank, kGatherAxis, 0, gathered[src_rank]);
        transport.wait_all();
        for (int src_rank = 1; src_rank < transport.nranks(); ++src_rank) {
            const auto& buf = gathered[src_rank];
            if (buf.size() % (1 + static_cast<std::size_t>(nsteps)) != 0)
                throw std::runtime_error("malformed trace gather payload from rank " +
                                         std::to_string(src_rank));
            const std::size_t count = buf.size() / (1 + static_cast<std::size_t>(nsteps));
            for (std::size_t q = 0; q < count; ++q) {
                const int idx = static_cast<int>(buf[q]);
                if (idx < 0 || idx >= geometry.nreceivers())
                    throw std::runtime_error("trace gather index out of range");
                for (int n = 0; n < nsteps; ++n)
                    rec.at(idx, n) = buf[count + q * static_cast<std::size_t>(nsteps) +
                                         static_cast<std::size_t>(n)];
            }
        }
    }

    rep.kernel_seconds = kernel;
    rep.modeling_seconds = std::chrono::duration<double>(Clock::now() - t_model).count();
    return {std::move(rec), rep};
}

std::pair<ShotRecord, RunReport> run_distributed_inproc(const SimConfig& config,
                                                        const EarthModel& model,
                                                        std::array<int, 3> dims,
                                                        std::ostream* progress) {
    const int nranks = dims[0] * dims[1] * dims[2];
    make_topology(dims, nranks); // validate the layout before spawning ranks
    InProcHub hub(nranks);
    std::vector<std::future<std::pair<ShotRecord, RunReport>>> futures;
    futures.reserve(nranks);
    for (int rank = 0; rank < nranks; ++rank)
        futures.push_back(std::async(std::launch::async, [&, rank] {
            auto ep = hub.endpoint(rank);
            return run_distributed_rank(config, model, dims, *ep,
                                        rank == 0 ? progress : nullptr);
        }));
    std::pair<ShotRecord, RunReport> result;
    std::exception_ptr first_error;
    for (int rank = 0; rank < nranks; ++rank) {
        try {
            auto r = futures[rank].get();
            if (rank == 0) result = std::move(r);
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

} // namespace minimod

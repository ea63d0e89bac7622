#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "minimod/model.hpp"
#include "minimod/parallel.hpp"
#include "minimod/propagator.hpp"
#include "minimod/source.hpp"

namespace minimod {

enum class Target { Seq, Parallel };

Target target_from_name(const std::string& name);
std::string target_name(Target t);

/// Full parameter set of one modeling run; every field appears in the
/// run report.
struct SimConfig {
    std::array<int, 3> ngrid{100, 100, 100};
    std::array<double, 3> dgrid{20.0, 20.0, 20.0};
    int nsteps = 1000;
    double fmax = 25.0;
    bool verbose = false;

    Propagator propagator = Propagator::AcousticIsoCd;
    Target target = Target::Seq;
    int nthreads = 1;
    double cfl = 0.8;
    std::array<int, 3> ndamping{27, 27, 27};
    std::array<int, 3> ntaper{3, 3, 3};
    bool taper = true;
    bool free_surface = false;
    double r_target = 1e-3;

    std::optional<std::array<int, 3>> source_loc; // default: grid center
    std::array<int, 2> receiver_increment{1, 1};
    std::array<int, 3> source_increment{1, 1, 0}; // passthrough, reported only
    int nshots = 1;
    double time_rec = 0.0; // passthrough, reported only

    int stencil_radius = 4;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct RunReport {
    double dt = 0.0;
    double kernel_seconds = 0.0;
    double modeling_seconds = 0.0;
    int steps_run = 0;
};

/// Stable time step for the second-order scheme:
///   dt = cfl * 2 / (vmax * sqrt(sum_axes s_axis)),
/// s_axis = |center| + 2 sum_m |c_m| with the 1/h^2 spacing folded into the
/// weights; this bounds the spectral radius of the discrete Laplacian.
double cfl_dt(const EarthModel& model, const Grid3D& grid, double cfl);

/// Algorithm: p0 := 0; for each step: advance the propagator, inject the
/// source, record the receivers. When `progress` is non-null a
/// "time step N / T" line is emitted every 100 steps.
std::pair<ShotRecord, RunReport> run(const SimConfig& config, const EarthModel& model,
                                     std::ostream* progress = nullptr);

TaskRunner select_target(const SimConfig& config);

/// Parameter block in the classic run-report layout (nthreads, ngrid, dgrid,
/// nsteps, fmax, vmin, vmax, cfl, stencil, source_loc, ndamping, ntaper,
/// nshots, time_rec, nreceivers, receiver_increment, source_increment).
std::string render_parameter_block(const SimConfig& config, const EarthModel& model);

/// "Time Kernel" / "Time Modeling" lines.
std::string render_timing(const RunReport& report);

/// Geometry actually used by run(): default surface receivers plus the
/// configured (or default center) source location.
AcquisitionGeometry build_geometry(const SimConfig& config, const Grid3D& grid);

} // namespace minimod

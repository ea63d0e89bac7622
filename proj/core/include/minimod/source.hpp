#pragma once

#include <array>
#include <string>
#include <vector>

#include "minimod/grid.hpp"

namespace minimod {

/// Source wavelet samples, one per time step, unit peak amplitude.
struct Wavelet {
    std::vector<float> samples;
    double dt = 0.0;
    double fmax = 0.0;
    double t0 = 0.0; // delay of the peak, seconds
};

/// Ricker wavelet with peak frequency fmax/2.5 and delay t0 = 1.5/f_peak.
Wavelet ricker(double fmax, double dt, int nsteps);

/// Running time-integral of a wavelet (cumulative sum * dt). The first-order
/// propagators inject this so their pressure response lines up in phase with
/// the second-order propagator, whose source enters one time-derivative later.
Wavelet integrate_wavelet(const Wavelet& w);

struct AcquisitionGeometry {
    std::array<int, 3> source_loc{0, 0, 0};
    std::array<int, 3> source_increment{1, 1, 0}; // config passthrough
    int nshots = 1;
    double time_rec = 0.0; // config passthrough
    std::array<int, 2> receiver_increment{1, 1};
    std::vector<std::array<int, 3>> receivers;

    int nreceivers() const { return static_cast<int>(receivers.size()); }
};

/// One receiver per interior (x, y) surface point, stride receiver_increment,
/// at the first interior plane below the top damping region (z = ndamping_z).
AcquisitionGeometry default_receivers(const Grid3D& grid, std::array<int, 3> ndamping,
                                      std::array<int, 2> increment = {1, 1});

/// Receiver traces, [nreceivers x nsteps], plus the geometry that produced them.
struct ShotRecord {
    int nsteps = 0;
    double dt = 0.0;
    AcquisitionGeometry geometry;
    std::vector<float> traces; // trace r, sample s at traces[r * nsteps + s]

    float& at(int receiver, int step) { return traces[static_cast<std::size_t>(receiver) * nsteps + step]; }
    float at(int receiver, int step) const { return traces[static_cast<std::size_t>(receiver) * nsteps + step]; }
};

ShotRecord make_record(const AcquisitionGeometry& geometry, int nsteps, double dt);

/// p(loc) += scale * amplitude; every other point untouched.
template <typename T>
void inject_source(FieldT<T>& p, T amplitude, std::array<int, 3> loc, T scale) {
    if (!p.grid.interior().contains(loc[0], loc[1], loc[2]))
        throw ConfigError("source location outside grid interior");
    p.at(loc[0], loc[1], loc[2]) += scale * amplitude;
}

void record(const Field& p, const AcquisitionGeometry& geometry, int step, ShotRecord& into);

/// Raw f32 LE trace matrix plus a JSON sidecar (dt, nsteps, geometry summary).
/// Both written atomically (temp file + rename).
void save_record(const ShotRecord& record, const std::string& path);

} // namespace minimod

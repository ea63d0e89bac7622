#include "minimod/source.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace minimod {

Wavelet ricker(double fmax, double dt, int nsteps) {
    if (!(fmax > 0.0)) throw ConfigError("fmax must be > 0");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (dt > 1.0 / (2.0 * fmax))
        throw ConfigError("dt too coarse to sample fmax: dt > 1/(2 fmax)");
    Wavelet w;
    w.dt = dt;
    w.fmax = fmax;
    const double f_peak = fmax / 2.5;
    w.t0 = 1.5 / f_peak;
    w.samples.resize(static_cast<std::size_t>(std::max(nsteps, 0)));
    for (int n = 0; n < nsteps; ++n) {
        const double tau = M_PI * f_peak * (n * dt - w.t0);
        const double a = tau * tau;
        w.samples[n] = static_cast<float>((1.0 - 2.0 * a) * std::exp(-a));
    }
    return w;
}

Wavelet integrate_wavelet(const Wavelet& w) {
    Wavelet out = w;
    double acc = 0.0;
    for (std::size_t n = 0; n < w.samples.size(); ++n) {
        acc += static_cast<double>(w.samples[n]) * w.dt;
        out.samples[n] = static_cast<float>(acc);
    }
    return out;
}

AcquisitionGeometry default_receivers(const Grid3D& grid, std::array<int, 3> ndamping,
                                      std::array<int, 2> increment) {
    AcquisitionGeometry g;
    g.source_loc = {grid.n[0] / 2, grid.n[1] / 2, grid.n[2] / 2};
    g.receiver_increment = increment;
    const int depth = ndamping[2];
    for (int i = 0; i < grid.n[0]; i += increment[0])
        for (int j = 0; j < grid.n[1]; j += increment[1])
            g.receivers.push_back({i, j, depth});
    return g;
}

ShotRecord make_record(const AcquisitionGeometry& geometry, int nsteps, double dt) {
    ShotRecord r;
    r.nsteps = nsteps;
    r.dt = dt;
    r.geometry = geometry;
    r.traces.assign(static_cast<std::size_t>(geometry.receivers.size()) * nsteps, 0.0f);
    return r;
}

void record(const Field& p, const AcquisitionGeometry& geometry, int step, ShotRecord& into) {
    for (std::size_t r = 0; r < geometry.receivers.size(); ++r) {
        const auto& loc = geometry.receivers[r];
        into.at(static_cast<int>(r), step) = p.at(loc[0], loc[1], loc[2]);
    }
}

void save_record(const ShotRecord& record, const std::string& path) {
    namespace fs = std::filesystem;
    if (path.empty()) throw ConfigError("empty output path");
    const fs::path data_tmp = path + ".tmp";
    {
        std::ofstream out(data_tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write trace file: " + path);
        out.write(reinterpret_cast<const char*>(record.traces.data()),
                  static_cast<std::streamsize>(record.traces.size() * sizeof(float)));
        if (!out) throw ConfigError("write failed: " + path);
    }
    nlohmann::json j;
    j["dt"] = record.dt;
    j["nsteps"] = record.nsteps;
    j["nreceivers"] = record.geometry.nreceivers();
    j["source_loc"] = record.geometry.source_loc;
    j["receiver_increment"] = record.geometry.receiver_increment;
    j["nshots"] = record.geometry.nshots;
    const std::string sidecar = path + ".json";
    const fs::path side_tmp = sidecar + ".tmp";
    {
        std::ofstream out(side_tmp, std::ios::trunc);
        if (!out) throw ConfigError("cannot write trace sidecar: " + sidecar);
        out << j.dump(2) << "\n";
    }
    fs::rename(data_tmp, path);
    fs::rename(side_tmp, sidecar);
}

} // namespace minimod

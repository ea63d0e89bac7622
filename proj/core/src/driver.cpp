#include "minimod/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace minimod {

Target target_from_name(const std::string& name) {
    if (name == "seq") return Target::Seq;
    if (name == "parallel") return Target::Parallel;
    throw ConfigError("unknown target '" + name + "' (valid: seq, parallel)");
}

std::string target_name(Target t) { return t == Target::Seq ? "seq" : "parallel"; }

double cfl_dt(const EarthModel& model, const Grid3D& grid, double cfl) {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must be in (0, 1]");
    double sum = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
        const StencilCoeffs s = second_derivative_coeffs(grid.radius, grid.d[ax]);
        double s_axis = std::fabs(s.center);
        for (double c : s.c) s_axis += 2.0 * std::fabs(c);
        sum += s_axis;
    }
    return cfl * 2.0 / (model.vmax * std::sqrt(sum));
}

TaskRunner select_target(const SimConfig& config) {
    if (config.target == Target::Seq) return TaskRunner(1);
    if (config.nthreads < 1) throw ConfigError("nthreads must be >= 1");
    return TaskRunner(config.nthreads);
}

AcquisitionGeometry build_geometry(const SimConfig& config, const Grid3D& grid) {
    AcquisitionGeometry g =
        default_receivers(grid, config.ndamping, config.receiver_increment);
    if (config.source_loc) g.source_loc = *config.source_loc;
    if (!grid.interior().contains(g.source_loc[0], g.source_loc[1], g.source_loc[2]))
        throw ConfigError("source location outside grid interior");
    g.source_increment = config.source_increment;
    g.nshots = config.nshots;
    g.time_rec = config.time_rec;
    return g;
}

namespace {

EngineOptions engine_options(const SimConfig& c) {
    EngineOptions o;
    o.ndamping = c.ndamping;
    o.fmax = c.fmax;
    o.r_target = c.r_target;
    o.free_surface = c.free_surface;
    o.taper = c.taper;
    o.ntaper = c.ntaper;
    return o;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_finite(float sample, int step) {
    if (!std::isfinite(sample))
        throw InstabilityError("non-finite wavefield sample detected", step);
}

void progress_line(std::ostream* out, int step, int nsteps) {
    if (out && step % 100 == 0) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " time step %11d / %11d\n", step, nsteps);
        *out << buf << std::flush;
    }
}

} // namespace

std::pair<ShotRecord, RunReport> run(const SimConfig& config, const EarthModel& model,
                                     std::ostream* progress) {
    if (config.nsteps < 1) throw ConfigError("nsteps must be >= 1");
    if (model.grid.n != config.ngrid)
        throw ConfigError("model grid does not match configured ngrid");
    const Grid3D grid = make_grid(config.ngrid, config.dgrid, config.stencil_radius);
    const double dt = cfl_dt(model, grid, config.cfl);
    const Wavelet w = ricker(config.fmax, dt, config.nsteps);
    const AcquisitionGeometry geometry = build_geometry(config, grid);
    const std::array<int, 3> src = geometry.source_loc;
    const TaskRunner runner = select_target(config);
    const EngineOptions opts = engine_options(config);

    ShotRecord rec = make_record(geometry, config.nsteps, dt);
    RunReport rep;
    rep.dt = dt;
    const auto t_model = Clock::now();
    double kernel = 0.0;

    auto loop = [&](auto&& step_fn, auto&& record_fn) {
        for (int n = 0; n < config.nsteps; ++n) {
            const auto t0 = Clock::now();
            step_fn(n);
            kernel += seconds_since(t0);
            record_fn(n);
            check_finite(rec.at(0, n), n + 1);
            progress_line(progress, n + 1, config.nsteps);
            rep.steps_run = n + 1;
        }
    };

    switch (config.propagator) {
        case Propagator::AcousticIsoCd: {
            AcousticCdEngine<float> eng(grid, {0, 0, 0}, grid.n, model.vp, opts,
                                        static_cast<float>(dt), model.vmax);
            loop([&](int n) { eng.step(w.samples[n], src, runner); },
                 [&](int n) { record(eng.pressure(), geometry, n, rec); });
            check_finite(eng.pressure().at(src[0], src[1], src[2]), config.nsteps);
            break;
        }
        case Propagator::AcousticIso: {
            const Wavelet wi = integrate_wavelet(w);
            AcousticVdEngine<float> eng(grid, model, opts, static_cast<float>(dt));
            loop([&](int n) { eng.step(wi.samples[n], src, runner); },
                 [&](int n) { record(eng.pressure(), geometry, n, rec); });
            break;
        }
        case Propagator::ElasticIso: {
            const Wavelet wi = integrate_wavelet(w);
            ElasticIsoEngine<float> eng(grid, model, opts, static_cast<float>(dt));
            loop([&](int n) { eng.step(wi.samples[n], src, runner); },
                 [&](int n) {
                     for (int r = 0; r < geometry.nreceivers(); ++r)
                         rec.at(r, n) = eng.pressure_at(geometry.receivers[r]);
                 });
            break;
        }
    }
    rep.kernel_seconds = kernel;
    rep.modeling_seconds = seconds_since(t_model);
    return {std::move(rec), rep};
}

namespace {

// List-directed single-precision style: 9 significant digits with trailing
// zeros kept (25.0000000, 0.800000012, ...).
std::string f32_repr(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%#.9g", static_cast<double>(static_cast<float>(v)));
    return buf;
}

void int_row(std::ostringstream& os, const char* name, std::initializer_list<int> vals) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " %-18s =", name);
    os << buf;
    for (int v : vals) {
        std::snprintf(buf, sizeof(buf), "%13d", v);
        os << buf;
    }
    os << "\n";
}

void float_row(std::ostringstream& os, const char* name, std::initializer_list<double> vals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %-18s =", name);
    os << buf;
    bool first = true;
    for (double v : vals) {
        os << (first ? "    " : "       ") << f32_repr(v);
        first = false;
    }
    os << "    \n";
}

} // namespace

std::string render_parameter_block(const SimConfig& c, const EarthModel& model) {
    const Grid3D grid = make_grid(c.ngrid, c.dgrid, c.stencil_radius);
    const AcquisitionGeometry g = build_geometry(c, grid);
    std::ostringstream os;
    int_row(os, "nthreads", {c.target == Target::Parallel ? c.nthreads : 1});
    os << " \n";
    int_row(os, "ngrid", {c.ngrid[0], c.ngrid[1], c.ngrid[2]});
    float_row(os, "dgrid", {c.dgrid[0], c.dgrid[1], c.dgrid[2]});
    int_row(os, "nsteps", {c.nsteps});
    float_row(os, "fmax", {c.fmax});
    float_row(os, "vmin", {model.vmin});
    float_row(os, "vmax", {model.vmax});
    float_row(os, "cfl", {c.cfl});
    os << " \n";
    int_row(os, "stencil", {c.stencil_radius, c.stencil_radius, c.stencil_radius});
    int_row(os, "source_loc", {g.source_loc[0], g.source_loc[1], g.source_loc[2]});
    int_row(os, "ndamping", {c.ndamping[0], c.ndamping[1], c.ndamping[2]});
    int_row(os, "ntaper", {c.ntaper[0], c.ntaper[1], c.ntaper[2]});
    os << " \n";
    int_row(os, "nshots", {c.nshots});
    float_row(os, "time_rec", {c.time_rec});
    int_row(os, "nreceivers", {g.nreceivers()});
    int_row(os, "receiver_increment", {g.receiver_increment[0], g.receiver_increment[1]});
    int_row(os, "source_increment",
            {g.source_increment[0], g.source_increment[1], g.source_increment[2]});
    os << " \n";
    return os.str();
}

std::string render_timing(const RunReport& r) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "Time Kernel    %10.2f\nTime Modeling  %10.2f\n",
                  r.kernel_seconds, r.modeling_seconds);
    return buf;
}

} // namespace minimod

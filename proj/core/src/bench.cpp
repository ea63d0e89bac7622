#include "minimod/bench.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "minimod/dist.hpp"

namespace minimod {

namespace {

using V = CountedValue;

// Replays of the per-point kernel expressions with counting operands. These
// mirror the shapes in the stencil/propagator inner loops; keep them in sync.

V laplacian_axis(OpTally* t, int radius) {
    V acc(t), p(t), c(t), w(t), two(t);
    for (int m = 1; m <= radius; ++m) acc += w * (p + p - two * c);
    return acc;
}

V staggered_axis(OpTally* t, int radius) {
    V acc(t), f(t), w(t);
    for (int m = 1; m <= radius; ++m) acc += w * (f - f);
    return acc;
}

long long cd_flops(int radius) {
    OpTally t;
    V lap = laplacian_axis(&t, radius) + laplacian_axis(&t, radius) + laplacian_axis(&t, radius);
    V two(&t), pc(&t), pp(&t), dt2(&t), vp(&t);
    V pn = two * pc - pp + dt2 * vp * vp * lap;
    (void)pn;
    return t.total();
}

long long vd_flops(int radius) {
    OpTally t;
    V dt(&t), rho(&t), vp(&t), v(&t), p(&t);
    // velocity update
    V inv_rho = dt / rho;
    V dpx = staggered_axis(&t, radius), dpy = staggered_axis(&t, radius),
      dpz = staggered_axis(&t, radius);
    v += inv_rho * dpx;
    v += inv_rho * dpy;
    v += inv_rho * dpz;
    // pressure update
    V dvx = staggered_axis(&t, radius), dvy = staggered_axis(&t, radius),
      dvz = staggered_axis(&t, radius);
    V bulk = rho * vp * vp;
    p += dt * bulk * (dvx + dvy + dvz);
    return t.total();
}

long long elastic_flops(int radius) {
    OpTally t;
    V dt(&t), lam(&t), mu(&t), rho(&t), two(&t), s(&t), v(&t);
    // stress update: 9 velocity derivatives, 3 normal rows, 3 shear rows
    V d[9] = {staggered_axis(&t, radius), staggered_axis(&t, radius), staggered_axis(&t, radius),
              staggered_axis(&t, radius), staggered_axis(&t, radius), staggered_axis(&t, radius),
              staggered_axis(&t, radius), staggered_axis(&t, radius), staggered_axis(&t, radius)};
    s += dt * ((lam + two * mu) * d[0] + lam * (d[1] + d[2]));
    s += dt * ((lam + two * mu) * d[1] + lam * (d[0] + d[2]));
    s += dt * ((lam + two * mu) * d[2] + lam * (d[0] + d[1]));
    s += dt * mu * (d[8] + d[7]);
    s += dt * mu * (d[6] + d[5]);
    s += dt * mu * (d[4] + d[3]);
    // velocity update: 9 stress derivatives, 3 rows
    V e[9] = {staggered_axis(&t, radius), staggered_axis(&t, radius), staggered_axis(&t, radius),
              staggered_axis(&t, radius), staggered_axis(&t, radius), staggered_axis(&t, radius),
              staggered_axis(&t, radius), staggered_axis(&t, radius), staggered_axis(&t, radius)};
    V inv_rho = dt / rho;
    v += inv_rho * (e[0] + e[1] + e[2]);
    v += inv_rho * (e[3] + e[4] + e[5]);
    v += inv_rho * (e[6] + e[7] + e[8]);
    return t.total();
}

} // namespace

KernelCostModel count_stencil_cost(Propagator propagator, int radius) {
    if (radius < 1 || radius > 8) throw ConfigError("stencil radius must be in [1, 8]");
    KernelCostModel m;
    switch (propagator) {
        case Propagator::AcousticIsoCd:
            m.flops_per_point = cd_flops(radius);
            m.bytes_per_point = 4 * 4; // p_cur, p_prev, vp reads + p_next write
            break;
        case Propagator::AcousticIso:
            m.flops_per_point = vd_flops(radius);
            m.bytes_per_point = 10 * 4; // p, vx, vy, vz, vp, rho reads + p, v writes
            break;
        case Propagator::ElasticIso:
            m.flops_per_point = elastic_flops(radius);
            m.bytes_per_point = 21 * 4; // 9 fields + lambda, mu, rho reads + 9 writes
            break;
    }
    m.arithmetic_intensity =
        static_cast<double>(m.flops_per_point) / static_cast<double>(m.bytes_per_point);
    return m;
}

std::vector<std::pair<int, std::array<int, 3>>> weak_scaling_plan(int base,
                                                                  const std::vector<int>& ranks,
                                                                  WeakMode mode) {
    if (base < 1) throw ConfigError("weak-scaling base size must be >= 1");
    std::vector<std::pair<int, std::array<int, 3>>> plan;
    for (int r : ranks) {
        if (r < 1) throw ConfigError("rank counts must be >= 1");
        if (mode == WeakMode::Ideal) {
            plan.push_back({r, {r * base, base, base}});
        } else if (r == 1) {
            plan.push_back({r, {base, base, base}}); // baseline is never rounded
        } else {
            // cube of equal total volume, side rounded up to a multiple of 64
            const double side = base * std::cbrt(static_cast<double>(r));
            const int rounded = static_cast<int>(std::ceil(side / 64.0)) * 64;
            plan.push_back({r, {rounded, rounded, rounded}});
        }
    }
    return plan;
}

void compute_efficiency(ScalingResult& result) {
    if (result.runs.empty()) return;
    const ScalingRun& b = result.runs[0];
    if (!b.ok || b.kernel_s <= 0.0) return;
    const double pts0 = static_cast<double>(b.n[0]) * b.n[1] * b.n[2];
    for (auto& run : result.runs) {
        if (!run.ok || run.kernel_s <= 0.0) continue;
        const double pts = static_cast<double>(run.n[0]) * run.n[1] * run.n[2];
        double eff;
        if (result.mode == ScalingMode::Strong)
            eff = b.kernel_s * b.ranks / (run.kernel_s * run.ranks);
        else
            eff = b.kernel_s * pts / (run.kernel_s * run.ranks * pts0);
        run.efficiency_pct = 100.0 * eff;
    }
}

namespace {

std::pair<double, double> default_execute(const SimConfig& config, int ranks) {
    const Grid3D grid = make_grid(config.ngrid, config.dgrid, config.stencil_radius);
    const EarthModel model = default_layered_model(grid);
    RunReport rep;
    if (ranks <= 1)
        rep = run(config, model).second;
    else
        rep = run_distributed_inproc(config, model, {ranks, 1, 1}).second;
    return {rep.kernel_seconds, rep.modeling_seconds};
}

} // namespace

ScalingResult run_scaling(const std::vector<std::pair<int, std::array<int, 3>>>& plan,
                          const SimConfig& config_template, ScalingMode mode,
                          const ScalingExecutor& executor) {
    ScalingResult result;
    result.mode = mode;
    const ScalingExecutor& exec = executor ? executor : ScalingExecutor(default_execute);
    for (const auto& [ranks, n] : plan) {
        SimConfig c = config_template;
        c.ngrid = n;
        ScalingRun run;
        run.run_id = "r" + std::to_string(ranks) + "_" + std::to_string(n[0]) + "x" +
                     std::to_string(n[1]) + "x" + std::to_string(n[2]);
        run.propagator = c.propagator;
        run.target = c.target;
        run.ranks = ranks;
        run.nthreads = c.target == Target::Parallel ? c.nthreads : 1;
        run.n = n;
        run.nsteps = c.nsteps;
        try {
            auto [kernel_s, modeling_s] = exec(c, ranks);
            run.kernel_s = kernel_s;
            run.modeling_s = modeling_s;
            if (kernel_s > 0.0)
                run.points_per_s =
                    static_cast<double>(n[0]) * n[1] * n[2] * c.nsteps / kernel_s;
        } catch (const std::exception& e) {
            run.ok = false;
            run.error = e.what(); // record and keep sweeping
        }
        result.runs.push_back(std::move(run));
    }
    compute_efficiency(result);
    return result;
}

namespace {

constexpr const char* kCsvHeader =
    "run_id,propagator,target,ranks,nthreads,nx,ny,nz,nsteps,kernel_s,modeling_s,"
    "points_per_s,efficiency_pct";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write file: " + tmp.string());
        out << content;
        if (!out) throw ConfigError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace

std::string emit_csv(const ScalingResult& result) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const auto& r : result.runs)
        os << r.run_id << "," << propagator_name(r.propagator) << "," << target_name(r.target)
           << "," << r.ranks << "," << r.nthreads << "," << r.n[0] << "," << r.n[1] << ","
           << r.n[2] << "," << r.nsteps << "," << num(r.kernel_s) << "," << num(r.modeling_s)
           << "," << num(r.points_per_s) << "," << num(r.efficiency_pct) << "\n";
    return os.str();
}

ScalingResult parse_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty scaling CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw ConfigError("unexpected scaling CSV header: " + line);
    ScalingResult result;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 13) throw ConfigError("malformed scaling CSV row: " + line);
        ScalingRun r;
        r.run_id = cells[0];
        r.propagator = propagator_from_name(cells[1]);
        r.target = target_from_name(cells[2]);
        r.ranks = std::stoi(cells[3]);
        r.nthreads = std::stoi(cells[4]);
        r.n = {std::stoi(cells[5]), std::stoi(cells[6]), std::stoi(cells[7])};
        r.nsteps = std::stoi(cells[8]);
        r.kernel_s = std::stod(cells[9]);
        r.modeling_s = std::stod(cells[10]);
        r.points_per_s = std::stod(cells[11]);
        r.efficiency_pct = std::stod(cells[12]);
        result.runs.push_back(std::move(r));
    }
    return result;
}

MachineSpec load_machine_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open machine file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid machine file " + path + ": " + e.what());
    }
    MachineSpec spec;
    if (!j.contains("peak_gflops") || !j.contains("peak_bw_gbs"))
        throw ConfigError("machine file needs peak_gflops and peak_bw_gbs: " + path);
    spec.peak_gflops = j.at("peak_gflops").get<double>();
    for (const auto& [name, v] : j.at("peak_bw_gbs").items())
        spec.bw_levels.emplace_back(name, v.get<double>());
    if (spec.peak_gflops <= 0.0 || spec.bw_levels.empty())
        throw ConfigError("machine file peaks must be positive: " + path);
    for (const auto& [name, bw] : spec.bw_levels)
        if (bw <= 0.0) throw ConfigError("machine file bandwidth must be positive: " + name);
    return spec;
}

// ------------------------------------------------------------------ plotting
//
// Minimal static SVG output; no plotting dependency. Both charts use a fixed
// canvas with a simple linear (efficiency) or log-log (roofline) mapping.

namespace {

constexpr int kW = 640, kH = 440;
constexpr int kMargin = 60;

std::string svg_head(const std::string& title) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       << title << "</text>\n";
    return os.str();
}

std::string line(double x1, double y1, double x2, double y2, const char* color,
                 double width = 1.5) {
    std::ostringstream os;
    os << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
       << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"/>\n";
    return os.str();
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                 int size = 12) {
    std::ostringstream os;
    os << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
       << "\" font-size=\"" << size << "\">" << s << "</text>\n";
    return os.str();
}

} // namespace

void emit_efficiency_plot(const ScalingResult& result, const std::string& path) {
    std::vector<const ScalingRun*> ok;
    for (const auto& r : result.runs)
        if (r.ok) ok.push_back(&r);
    std::ostringstream os;
    os << svg_head(result.mode == ScalingMode::Strong ? "Strong-scaling efficiency"
                                                      : "Weak-scaling efficiency");
    const double x0 = kMargin, x1 = kW - kMargin, y0 = kH - kMargin, y1 = 50;
    os << line(x0, y0, x1, y0, "black") << line(x0, y0, x0, y1, "black");
    os << text((x0 + x1) / 2, kH - 16, "ranks") << text(18, (y0 + y1) / 2, "%", "middle");
    int rmax = 1;
    for (const auto* r : ok) rmax = std::max(rmax, r->ranks);
    auto xmap = [&](int ranks) {
        return rmax > 1 ? x0 + (x1 - x0) * (ranks - 1) / static_cast<double>(rmax - 1)
                        : (x0 + x1) / 2;
    };
    auto ymap = [&](double pct) {
        const double clamped = std::min(std::max(pct, 0.0), 120.0);
        return y0 - (y0 - y1) * clamped / 120.0;
    };
    for (int pct = 0; pct <= 120; pct += 20)
        os << line(x0, ymap(pct), x1, ymap(pct), "#dddddd", 0.7)
           << text(x0 - 8, ymap(pct) + 4, std::to_string(pct), "end", 10);
    os << line(x0, ymap(100), x1, ymap(100), "#888888", 1.0); // ideal
    for (std::size_t i = 0; i + 1 < ok.size(); ++i)
        os << line(xmap(ok[i]->ranks), ymap(ok[i]->efficiency_pct), xmap(ok[i + 1]->ranks),
                   ymap(ok[i + 1]->efficiency_pct), "#1f77b4", 2.0);
    for (const auto* r : ok) {
        os << "<circle cx=\"" << xmap(r->ranks) << "\" cy=\"" << ymap(r->efficiency_pct)
           << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
        os << text(xmap(r->ranks), y0 + 16, std::to_string(r->ranks), "middle", 10);
    }
    os << "</svg>\n";
    atomic_write(path, os.str());
}

void emit_roofline_plot(const KernelCostModel& cost, const MachineSpec& machine,
                        double achieved_gflops, const std::string& path) {
    std::ostringstream os;
    os << svg_head("Roofline");
    const double x0 = kMargin, x1 = kW - kMargin, y0 = kH - kMargin, y1 = 50;
    os << line(x0, y0, x1, y0, "black") << line(x0, y0, x0, y1, "black");
    os << text((x0 + x1) / 2, kH - 16, "arithmetic intensity (flop/byte)")
       << text(18, (y0 + y1) / 2, "GF/s");
    // log10 axes: AI in [2^-4, 2^6], perf up to 2x peak
    const double ai_lo = std::log10(1.0 / 16.0), ai_hi = std::log10(64.0);
    const double gf_hi = std::log10(machine.peak_gflops * 2.0);
    const double gf_lo = gf_hi - 4.0;
    auto xmap = [&](double ai) {
        return x0 + (x1 - x0) * (std::log10(ai) - ai_lo) / (ai_hi - ai_lo);
    };
    auto ymap = [&](double gf) {
        const double l = std::min(std::max(std::log10(gf), gf_lo), gf_hi);
        return y0 - (y0 - y1) * (l - gf_lo) / (gf_hi - gf_lo);
    };
    const char* colors[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    int ci = 0;
    for (const auto& [name, bw] : machine.bw_levels) {
        // memory roof bw*ai up to the ridge point peak/bw, then flat
        const double ridge = machine.peak_gflops / bw;
        const double ai_start = std::pow(10.0, ai_lo);
        const char* color = colors[ci++ % 4];
        os << line(xmap(ai_start), ymap(bw * ai_start), xmap(ridge), ymap(machine.peak_gflops),
                   color);
        os << text(xmap(ridge), ymap(machine.peak_gflops) - 6, name, "middle", 10);
    }
    os << line(xmap(std::pow(10.0, ai_lo)), ymap(machine.peak_gflops),
               xmap(std::pow(10.0, ai_hi)), ymap(machine.peak_gflops), "#555555");
    os << text(x1 - 4, ymap(machine.peak_gflops) - 6, "peak " + num(machine.peak_gflops) + " GF/s",
               "end", 10);
    const double ai = cost.arithmetic_intensity;
    os << line(xmap(ai), y0, xmap(ai), y1, "#1f77b4", 1.0);
    os << text(xmap(ai), y1 - 4, "kernel AI " + num(ai), "middle", 10);
    if (achieved_gflops > 0.0) {
        os << "<circle cx=\"" << xmap(ai) << "\" cy=\"" << ymap(achieved_gflops)
           << "\" r=\"5\" fill=\"#1f77b4\"/>\n";
        os << text(xmap(ai) + 8, ymap(achieved_gflops), num(achieved_gflops) + " GF/s", "start",
                   10);
    }
    os << "</svg>\n";
    atomic_write(path, os.str());
}

std::vector<std::string> emit_report(const ScalingResult& result, const KernelCostModel& cost,
                                     const std::string& prefix, bool plots,
                                     const MachineSpec* machine) {
    std::vector<std::string> files;
    const std::string csv_path = prefix + ".csv";
    atomic_write(csv_path, emit_csv(result));
    files.push_back(csv_path);
    if (!plots) return files;
    const std::string eff_path = prefix + "_efficiency.svg";
    emit_efficiency_plot(result, eff_path);
    files.push_back(eff_path);
    if (machine) {
        // achieved = best run's point rate times flops per point
        double achieved = 0.0;
        for (const auto& r : result.runs)
            if (r.ok)
                achieved = std::max(achieved,
                                    r.points_per_s * cost.flops_per_point / 1e9);
        const std::string roof_path = prefix + "_roofline.svg";
        emit_roofline_plot(cost, *machine, achieved, roof_path);
        files.push_back(roof_path);
    }
    return files;
}

} // namespace minimod

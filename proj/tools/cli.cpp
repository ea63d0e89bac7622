#include "cli.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "minimod/bench.hpp"
#include "minimod/dist.hpp"

namespace minimod::cli {

namespace {

template <typename T, std::size_t N>
std::array<T, N> parse_tuple(const std::string& flag, const std::string& value) {
    std::array<T, N> out{};
    std::istringstream in(value);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(in, cell, ',')) {
        if (i >= N)
            throw ConfigError(flag + " expects " + std::to_string(N) +
                              " comma-separated values, got '" + value + "'");
        try {
            std::size_t used = 0;
            if constexpr (std::is_integral_v<T>)
                out[i] = static_cast<T>(std::stoll(cell, &used));
            else
                out[i] = static_cast<T>(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ConfigError(flag + ": cannot parse '" + cell + "'");
        }
        ++i;
    }
    if (i != N || in.peek() != std::istringstream::traits_type::eof())
        throw ConfigError(flag + " expects " + std::to_string(N) + " comma-separated values, got '" +
                          value + "'");
    return out;
}

template <typename T, std::size_t N>
std::string join_tuple(const std::array<T, N>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < N; ++i) {
        if (i) os << ",";
        if constexpr (std::is_integral_v<T>)
            os << v[i];
        else {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(v[i]));
            os << buf;
        }
    }
    return os.str();
}

struct RawFlags {
    std::string ngrid = "100,100,100";
    std::string dgrid = "20,20,20";
    std::string ranks = "1,1,1";
    std::string bench_ranks = "1";
    std::string propagator = "acoustic_iso_cd";
    std::string target = "seq";
};

CLI::App* build_app(CLI::App& app, CliArgs& a, RawFlags& raw) {
    app.add_option("--ngrid", raw.ngrid, "Grid size")->capture_default_str();
    app.add_option("--dgrid", raw.dgrid, "Grid spacing (m)")->capture_default_str();
    app.add_option("--nsteps", a.config.nsteps, "Number of time steps")->capture_default_str();
    app.add_option("--fmax", a.config.fmax, "Maximum source frequency (Hz)")
        ->capture_default_str();
    app.add_flag("--verbose", a.config.verbose, "Print progress every 100 steps");
    app.add_option("--propagator", raw.propagator,
                   "Wave equation: acoustic_iso_cd | acoustic_iso | elastic_iso")
        ->capture_default_str();
    app.add_option("--target", raw.target, "Execution target: seq | parallel")
        ->capture_default_str();
    app.add_option("--nthreads", a.config.nthreads,
                   "Worker threads for the parallel target (env MINIMOD_NTHREADS)")
        ->capture_default_str();
    app.add_flag("--free-surface", a.config.free_surface, "Pressure-free top boundary");
    app.add_option("--model-manifest", a.model_manifest,
                   "JSON model manifest (default: built-in two-layer model)");
    app.add_option("--output", a.output, "Trace output path (bench: report prefix)");
    app.add_option("--ranks", raw.ranks, "dist: process grid px,py,pz")->capture_default_str();
    app.add_option("--transport", a.transport, "dist: inproc | socket")->capture_default_str();
    app.add_option("--rank", a.rank, "dist --transport socket: rank of this process");
    app.add_option("--hostfile", a.hostfile, "dist --transport socket: host:port per rank");
    app.add_option("--mode", a.mode,
                   "bench: strong | weak-ideal | weak-practical; plan: ideal | practical")
        ->capture_default_str();
    app.add_option("--bench-ranks", raw.bench_ranks, "bench/plan: comma-separated rank counts")
        ->capture_default_str();
    app.add_option("--plan-base", a.plan_base, "plan: baseline cube side")->capture_default_str();
    app.add_option("--machine-file", a.machine_file, "bench: JSON hardware peaks for roofline");
    app.add_flag("--plots", a.plots, "bench: also emit SVG charts");
    return &app;
}

bool given(const CLI::App& app, const std::string& name) {
    return app.get_option(name)->count() > 0;
}

void reject_if_given(const CLI::App& app, const CliArgs& a,
                     std::initializer_list<const char*> flags,
                     std::initializer_list<const char*> allowed_subs) {
    for (const char* f : flags) {
        if (!given(app, f)) continue;
        for (const char* s : allowed_subs)
            if (a.subcommand == s) goto next;
        throw ConfigError(std::string(f) + " is not valid with subcommand '" + a.subcommand + "'");
    next:;
    }
}

} // namespace

CliArgs parse(const std::vector<std::string>& args) {
    CliArgs a;
    std::vector<std::string> rest = args;
    if (!rest.empty() && !rest[0].empty() && rest[0][0] != '-') {
        a.subcommand = rest[0];
        rest.erase(rest.begin());
    }
    if (a.subcommand != "model" && a.subcommand != "dist" && a.subcommand != "bench" &&
        a.subcommand != "plan")
        throw ConfigError("unknown subcommand '" + a.subcommand +
                          "' (valid: model, dist, bench, plan)");

    CLI::App app{"finite-difference seismic modeling"};
    RawFlags raw;
    build_app(app, a, raw);
    try {
        app.parse(std::vector<std::string>(rest.rbegin(), rest.rend()));
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    a.config.ngrid = parse_tuple<int, 3>("--ngrid", raw.ngrid);
    a.config.dgrid = parse_tuple<double, 3>("--dgrid", raw.dgrid);
    a.config.propagator = propagator_from_name(raw.propagator);
    a.config.target = target_from_name(raw.target);
    a.ranks = parse_tuple<int, 3>("--ranks", raw.ranks);
    a.bench_ranks.clear();
    {
        std::istringstream in(raw.bench_ranks);
        std::string cell;
        while (std::getline(in, cell, ',')) {
            try {
                a.bench_ranks.push_back(std::stoi(cell));
            } catch (const std::exception&) {
                throw ConfigError("--bench-ranks: cannot parse '" + cell + "'");
            }
        }
        if (a.bench_ranks.empty()) throw ConfigError("--bench-ranks must not be empty");
    }

    if (!given(app, "--nthreads")) {
        if (const char* env = std::getenv("MINIMOD_NTHREADS")) {
            try {
                a.config.nthreads = std::stoi(env);
            } catch (const std::exception&) {
                throw ConfigError("MINIMOD_NTHREADS is not an integer");
            }
        }
    }

    reject_if_given(app, a, {"--ranks", "--transport", "--rank", "--hostfile"}, {"dist"});
    reject_if_given(app, a, {"--mode", "--bench-ranks", "--machine-file", "--plots"},
                    {"bench", "plan"});
    reject_if_given(app, a, {"--plan-base"}, {"plan"});
    reject_if_given(app, a, {"--model-manifest"}, {"model", "dist", "bench"});
    reject_if_given(app, a, {"--output"}, {"model", "dist", "bench"});

    if (a.config.nsteps < 1) throw ConfigError("--nsteps must be >= 1");
    if (a.config.fmax <= 0.0) throw ConfigError("--fmax must be > 0");
    if (a.config.nthreads < 1) throw ConfigError("--nthreads must be >= 1");
    for (int ax = 0; ax < 3; ++ax) {
        if (a.config.ngrid[ax] < 1) throw ConfigError("--ngrid entries must be >= 1");
        if (!(a.config.dgrid[ax] > 0.0)) throw ConfigError("--dgrid entries must be > 0");
        if (a.ranks[ax] < 1) throw ConfigError("--ranks entries must be >= 1");
    }
    if (a.transport != "inproc" && a.transport != "socket")
        throw ConfigError("--transport must be inproc or socket");
    if (a.subcommand == "dist" && a.transport == "socket") {
        if (a.rank < 0) throw ConfigError("dist --transport socket requires --rank");
        if (a.hostfile.empty()) throw ConfigError("dist --transport socket requires --hostfile");
    }
    if (a.subcommand == "bench" &&
        a.mode != "strong" && a.mode != "weak-ideal" && a.mode != "weak-practical")
        throw ConfigError("bench --mode must be strong, weak-ideal, or weak-practical");
    if (a.subcommand == "plan" && a.mode == "strong") a.mode = "ideal"; // plan default
    if (a.subcommand == "plan" && a.mode != "ideal" && a.mode != "practical")
        throw ConfigError("plan --mode must be ideal or practical");
    if (a.plan_base < 1) throw ConfigError("--plan-base must be >= 1");
    return a;
}

std::vector<std::string> render(const CliArgs& a) {
    std::vector<std::string> v{a.subcommand};
    auto opt = [&](const char* flag, const std::string& val) {
        v.push_back(flag);
        v.push_back(val);
    };
    opt("--ngrid", join_tuple(a.config.ngrid));
    opt("--dgrid", join_tuple(a.config.dgrid));
    opt("--nsteps", std::to_string(a.config.nsteps));
    {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", a.config.fmax);
        opt("--fmax", buf);
    }
    if (a.config.verbose) v.push_back("--verbose");
    opt("--propagator", propagator_name(a.config.propagator));
    opt("--target", target_name(a.config.target));
    opt("--nthreads", std::to_string(a.config.nthreads));
    if (a.config.free_surface) v.push_back("--free-surface");
    if (a.subcommand != "plan") {
        if (!a.model_manifest.empty()) opt("--model-manifest", a.model_manifest);
        if (!a.output.empty()) opt("--output", a.output);
    }
    if (a.subcommand == "dist") {
        opt("--ranks", join_tuple(a.ranks));
        opt("--transport", a.transport);
        if (a.rank >= 0) opt("--rank", std::to_string(a.rank));
        if (!a.hostfile.empty()) opt("--hostfile", a.hostfile);
    }
    if (a.subcommand == "bench" || a.subcommand == "plan") {
        opt("--mode", a.mode);
        std::string rs;
        for (std::size_t i = 0; i < a.bench_ranks.size(); ++i)
            rs += (i ? "," : "") + std::to_string(a.bench_ranks[i]);
        opt("--bench-ranks", rs);
        if (a.subcommand == "plan") opt("--plan-base", std::to_string(a.plan_base));
        if (!a.machine_file.empty()) opt("--machine-file", a.machine_file);
        if (a.plots) v.push_back("--plots");
    }
    return v;
}

std::string help_text() {
    CLI::App app{"finite-difference seismic modeling"};
    app.name("minimod");
    CliArgs a;
    RawFlags raw;
    build_app(app, a, raw);
    std::string usage = "Usage: minimod [model|dist|bench|plan] [OPTIONS]\n\n";
    return usage + app.help();
}

namespace {

EarthModel build_model(const CliArgs& a, const Grid3D& grid) {
    if (a.model_manifest.empty()) return default_layered_model(grid);
    EarthModel m = load_model(a.model_manifest);
    if (m.grid.n != a.config.ngrid)
        throw ConfigError("model manifest grid does not match --ngrid");
    return m;
}

int cmd_model(const CliArgs& a, std::ostream& out) {
    const Grid3D grid = make_grid(a.config.ngrid, a.config.dgrid, a.config.stencil_radius);
    const EarthModel model = build_model(a, grid);
    out << render_parameter_block(a.config, model);
    auto [rec, rep] = run(a.config, model, a.config.verbose ? &out : nullptr);
    out << render_timing(rep);
    if (!a.output.empty()) save_record(rec, a.output);
    return 0;
}

int cmd_dist(const CliArgs& a, std::ostream& out) {
    const Grid3D grid = make_grid(a.config.ngrid, a.config.dgrid, a.config.stencil_radius);
    const EarthModel model = build_model(a, grid);
    if (a.transport == "inproc") {
        out << render_parameter_block(a.config, model);
        auto [rec, rep] = run_distributed_inproc(a.config, model, a.ranks,
                                                 a.config.verbose ? &out : nullptr);
        out << render_timing(rep);
        if (!a.output.empty()) save_record(rec, a.output);
        return 0;
    }
    SocketTransport transport(a.rank, parse_hostfile(a.hostfile));
    if (a.rank == 0) out << render_parameter_block(a.config, model);
    auto [rec, rep] = run_distributed_rank(a.config, model, a.ranks, transport,
                                           a.rank == 0 && a.config.verbose ? &out : nullptr);
    if (a.rank == 0) {
        out << render_timing(rep);
        if (!a.output.empty()) save_record(rec, a.output);
    }
    return 0;
}

int cmd_plan(const CliArgs& a, std::ostream& out) {
    const auto plan = weak_scaling_plan(
        a.plan_base, a.bench_ranks,
        a.mode == "practical" ? WeakMode::Practical : WeakMode::Ideal);
    out << "ranks,nx,ny,nz\n";
    for (const auto& [r, n] : plan)
        out << r << "," << n[0] << "," << n[1] << "," << n[2] << "\n";
    return 0;
}

int cmd_bench(const CliArgs& a, std::ostream& out) {
    std::vector<std::pair<int, std::array<int, 3>>> plan;
    ScalingMode mode;
    if (a.mode == "strong") {
        mode = ScalingMode::Strong;
        for (int r : a.bench_ranks) plan.push_back({r, a.config.ngrid});
    } else {
        mode = a.mode == "weak-ideal" ? ScalingMode::WeakIdeal : ScalingMode::WeakPractical;
        plan = weak_scaling_plan(a.config.ngrid[0], a.bench_ranks,
                                 a.mode == "weak-ideal" ? WeakMode::Ideal : WeakMode::Practical);
    }
    const ScalingResult result = run_scaling(plan, a.config, mode);
    const KernelCostModel cost =
        count_stencil_cost(a.config.propagator, a.config.stencil_radius);
    out << emit_csv(result);
    if (!a.output.empty()) {
        MachineSpec machine;
        const bool have_machine = !a.machine_file.empty();
        if (have_machine) machine = load_machine_file(a.machine_file);
        for (const auto& f : emit_report(result, cost, a.output, a.plots,
                                         have_machine ? &machine : nullptr))
            out << "wrote " << f << "\n";
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (!args.empty() && (args[0] == "-h" || args[0] == "--help" || args[0] == "help")) {
        out << help_text();
        return 0;
    }
    CliArgs a;
    try {
        a = parse(args);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n\n" << help_text();
        return 2;
    }
    try {
        if (a.subcommand == "model") return cmd_model(a, out);
        if (a.subcommand == "dist") return cmd_dist(a, out);
        if (a.subcommand == "plan") return cmd_plan(a, out);
        return cmd_bench(a, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace minimod::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "minimod/driver.hpp"

namespace minimod::cli {

/// Parsed command line. Modeling parameters live in `config`; the rest are
/// frontend concerns (I/O paths, distribution, bench options).
struct CliArgs {
    std::string subcommand = "model"; // model | dist | bench | plan

    SimConfig config;

    std::string model_manifest; // empty: built-in two-layer model
    std::string output;         // model/dist: trace path; bench: report prefix

    // dist
    std::array<int, 3> ranks{1, 1, 1};
    std::string transport = "inproc"; // inproc | socket
    int rank = -1;                    // socket: rank of this process
    std::string hostfile;             // socket: host:port per rank

    // bench / plan
    std::string mode = "strong"; // bench: strong|weak-ideal|weak-practical; plan: ideal|practical
    std::vector<int> bench_ranks{1};
    int plan_base = 1000;
    std::string machine_file;
    bool plots = false;

    friend bool operator==(const CliArgs&, const CliArgs&) = default;
};

/// Parse argv (without the program name). Throws ConfigError on bad usage.
CliArgs parse(const std::vector<std::string>& args);

/// Canonical argv for `a`; parse(render(a)) == a for any valid CliArgs.
std::vector<std::string> render(const CliArgs& a);

std::string help_text();

/// Full frontend: parse, dispatch, print. Exit codes: 0 ok, 2 usage error,
/// 3 runtime/instability error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace minimod::cli

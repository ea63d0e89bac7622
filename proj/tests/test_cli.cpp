#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"

using namespace minimod;
using cli::CliArgs;

TEST_CASE("bare invocation is the default model run") {
    const CliArgs a = cli::parse({});
    CHECK(a.subcommand == "model");
    CHECK(a.config.ngrid == std::array<int, 3>{100, 100, 100});
    CHECK(a.config.dgrid == std::array<double, 3>{20.0, 20.0, 20.0});
    CHECK(a.config.nsteps == 1000);
    CHECK(a.config.fmax == 25.0);
    CHECK(a.config.cfl == 0.8);
    CHECK(a.config.ndamping == std::array<int, 3>{27, 27, 27});
    CHECK(a.config.propagator == Propagator::AcousticIsoCd);
    CHECK(a.config.target == Target::Seq);
    CHECK(a.config.nthreads == 1);
    CHECK_FALSE(a.config.verbose);
}

TEST_CASE("flags land in the configuration") {
    const CliArgs a = cli::parse({"model", "--ngrid", "240,240,240", "--nsteps", "300",
                                  "--propagator", "elastic_iso", "--target", "parallel",
                                  "--nthreads", "8", "--verbose", "--fmax", "30"});
    CHECK(a.config.ngrid == std::array<int, 3>{240, 240, 240});
    CHECK(a.config.nsteps == 300);
    CHECK(a.config.propagator == Propagator::ElasticIso);
    CHECK(a.config.target == Target::Parallel);
    CHECK(a.config.nthreads == 8);
    CHECK(a.config.verbose);
    CHECK(a.config.fmax == 30.0);
}

TEST_CASE("malformed and unknown inputs are usage errors") {
    CHECK_THROWS_AS(cli::parse({"--ngrid", "240,240"}), ConfigError);       // two of three
    CHECK_THROWS_AS(cli::parse({"--ngrid", "a,b,c"}), ConfigError);
    CHECK_THROWS_AS(cli::parse({"--ngrid", "1,2,3,4"}), ConfigError);
    CHECK_THROWS_AS(cli::parse({"--frobnicate"}), ConfigError);             // unknown flag
    CHECK_THROWS_AS(cli::parse({"render"}), ConfigError);                   // unknown subcommand
    CHECK_THROWS_AS(cli::parse({"--nsteps", "0"}), ConfigError);
    CHECK_THROWS_AS(cli::parse({"--dgrid", "0,20,20"}), ConfigError);
    CHECK_THROWS_AS(cli::parse({"--propagator", "acoustic_tti"}), ConfigError);
}

TEST_CASE("subcommand-specific flags are fenced off") {
    CHECK_THROWS_AS(cli::parse({"model", "--ranks", "2,1,1"}), ConfigError);
    CHECK_THROWS_AS(cli::parse({"model", "--mode", "strong"}), ConfigError);
    CHECK_THROWS_AS(cli::parse({"dist", "--plots"}), ConfigError);
    CHECK_THROWS_AS(cli::parse({"bench", "--plan-base", "500"}), ConfigError);
    CHECK_THROWS_AS(cli::parse({"plan", "--output", "x"}), ConfigError);
    CHECK_NOTHROW(cli::parse({"dist", "--ranks", "2,1,1"}));
    CHECK_NOTHROW(cli::parse({"plan", "--plan-base", "500"}));
}

TEST_CASE("socket transport needs a rank and a hostfile") {
    CHECK_THROWS_AS(cli::parse({"dist", "--transport", "socket"}), ConfigError);
    CHECK_THROWS_AS(cli::parse({"dist", "--transport", "socket", "--rank", "0"}), ConfigError);
    CHECK_NOTHROW(cli::parse({"dist", "--transport", "socket", "--rank", "0", "--hostfile",
                              "hosts.txt"}));
    CHECK_THROWS_AS(cli::parse({"dist", "--transport", "carrier-pigeon"}), ConfigError);
}

TEST_CASE("bench and plan modes are validated") {
    CHECK(cli::parse({"bench", "--mode", "weak-ideal"}).mode == "weak-ideal");
    CHECK_THROWS_AS(cli::parse({"bench", "--mode", "diagonal"}), ConfigError);
    CHECK(cli::parse({"plan"}).mode == "ideal"); // plan's own default
    CHECK(cli::parse({"plan", "--mode", "practical"}).mode == "practical");
    CHECK_THROWS_AS(cli::parse({"plan", "--mode", "strong-ish"}), ConfigError);
    const CliArgs b = cli::parse({"bench", "--bench-ranks", "1,2,4,8"});
    CHECK(b.bench_ranks == std::vector<int>{1, 2, 4, 8});
}

TEST_CASE("render and parse are inverse on valid argument sets") {
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{},
          {"model", "--ngrid", "240,240,240", "--nsteps", "300", "--verbose"},
          {"model", "--propagator", "acoustic_iso", "--target", "parallel", "--nthreads", "4",
           "--output", "/tmp/shot.f32"},
          {"dist", "--ranks", "2,2,1", "--transport", "inproc", "--ngrid", "64,64,64"},
          {"dist", "--transport", "socket", "--rank", "1", "--hostfile", "h.txt"},
          {"bench", "--mode", "weak-practical", "--bench-ranks", "1,8,64", "--plots",
           "--machine-file", "m.json"},
          {"plan", "--mode", "practical", "--plan-base", "800", "--bench-ranks", "1,2,4"}}) {
        const CliArgs a = cli::parse(args);
        const CliArgs b = cli::parse(cli::render(a));
        CHECK(a == b);
    }
}

TEST_CASE("help names every flag with its default") {
    const std::string h = cli::help_text();
    for (const char* needle :
         {"minimod", "--ngrid", "--dgrid", "--nsteps", "--fmax", "--propagator", "--target",
          "--nthreads", "--ranks", "--transport", "--hostfile", "--mode", "--bench-ranks",
          "--plan-base", "--machine-file", "--plots", "--output", "--model-manifest",
          "100,100,100", "acoustic_iso_cd"})
        CHECK(h.find(needle) != std::string::npos);
}

TEST_CASE("environment supplies nthreads unless the flag wins") {
    setenv("MINIMOD_NTHREADS", "6", 1);
    CHECK(cli::parse({}).config.nthreads == 6);
    CHECK(cli::parse({"model", "--nthreads", "2"}).config.nthreads == 2);
    setenv("MINIMOD_NTHREADS", "soon", 1);
    CHECK_THROWS_AS(cli::parse({}), ConfigError);
    unsetenv("MINIMOD_NTHREADS");
    CHECK(cli::parse({}).config.nthreads == 1);
}

TEST_CASE("run_cli executes a small model run end to end") {
    std::ostringstream out, err;
    // default 100^3 grid: the damping layers need room, and the CLI pins them
    const int rc = cli::run_cli({"model", "--nsteps", "20"}, out, err);
    CHECK(rc == 0);
    CHECK(err.str().empty());
    const std::string s = out.str();
    CHECK(s.find("ngrid") != std::string::npos);
    CHECK(s.find("Time Kernel") != std::string::npos);
    CHECK(s.find("Time Modeling") != std::string::npos);
}

TEST_CASE("run_cli prints the scaling plan as CSV") {
    std::ostringstream out, err;
    const int rc = cli::run_cli({"plan", "--mode", "practical", "--bench-ranks", "1,2,4,6"},
                                out, err);
    CHECK(rc == 0);
    const std::string s = out.str();
    CHECK(s.find("ranks,nx,ny,nz") != std::string::npos);
    CHECK(s.find("1,1000,1000,1000") != std::string::npos);
    CHECK(s.find("2,1280,1280,1280") != std::string::npos);
    CHECK(s.find("4,1600,1600,1600") != std::string::npos);
    CHECK(s.find("6,1856,1856,1856") != std::string::npos);
}

TEST_CASE("usage errors exit 2 and point at the problem") {
    std::ostringstream out, err;
    CHECK(cli::run_cli({"--nsteps", "banana"}, out, err) == 2);
    CHECK_FALSE(err.str().empty());

    std::ostringstream out2, err2;
    CHECK(cli::run_cli({"launch"}, out2, err2) == 2);
    CHECK(err2.str().find("launch") != std::string::npos);
}

TEST_CASE("a missing model manifest fails without partial trace output") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "minimod_test_cli_out";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string trace = (dir / "shot.f32").string();
    std::ostringstream out, err;
    const int rc = cli::run_cli({"model", "--ngrid", "16,16,16", "--nsteps", "5",
                                 "--model-manifest", (dir / "nope.json").string(), "--output",
                                 trace},
                                out, err);
    CHECK(rc == 2);
    CHECK_FALSE(fs::exists(trace));
    CHECK_FALSE(err.str().empty());
    fs::remove_all(dir);
}

TEST_CASE("help requests are not errors") {
    for (const char* flag : {"--help", "-h", "help"}) {
        std::ostringstream out, err;
        CHECK(cli::run_cli({flag}, out, err) == 0);
        CHECK(out.str().find("--ngrid") != std::string::npos);
    }
}

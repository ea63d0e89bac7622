#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "minimod/model.hpp"

using namespace minimod;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    fs::path p = fs::temp_directory_path() / (std::string("minimod_test_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

EarthModel random_model(const Grid3D& g, unsigned seed, bool with_vs, bool with_rho) {
    EarthModel m;
    m.grid = g;
    m.vp = Field(g, "vp");
    if (with_vs) m.vs = Field(g, "vs");
    if (with_rho) m.rho = Field(g, "rho");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const float vp = 1500.0f + 3000.0f * u(rng);
                m.vp.at(i, j, k) = vp;
                if (with_vs) m.vs->at(i, j, k) = 0.5f * vp * u(rng);
                if (with_rho) m.rho->at(i, j, k) = 1000.0f + 1000.0f * u(rng);
            }
    validate_model(m);
    return m;
}

} // namespace

TEST_CASE("constant model caches velocity bounds") {
    const Grid3D g = make_grid({8, 8, 8}, {20, 20, 20});
    const EarthModel m = constant_model(g, 1500.0f);
    CHECK(m.vmin == 1500.0f);
    CHECK(m.vmax == 1500.0f);
    CHECK_FALSE(m.has_vs());
    CHECK_FALSE(m.has_rho());
}

TEST_CASE("default two-layer model spans the reported velocity range") {
    const Grid3D g = make_grid({16, 16, 16}, {20, 20, 20});
    const EarthModel m = default_layered_model(g);
    CHECK(m.vmin == 1500.0f);
    CHECK(m.vmax == 4500.0f);
    CHECK(m.vp.at(8, 8, 0) == 1500.0f);
    CHECK(m.vp.at(8, 8, 15) == 4500.0f);
    CHECK(m.has_rho());
}

TEST_CASE("validation rejects unphysical volumes") {
    const Grid3D g = make_grid({4, 4, 4}, {1, 1, 1});
    CHECK_THROWS_AS(constant_model(g, 1500.0f, 1600.0f, 1000.0f), ValidationError);
    CHECK_THROWS_AS(constant_model(g, -1.0f), ValidationError);
    CHECK_THROWS_AS(constant_model(g, 1500.0f, std::nullopt, 0.0f), ValidationError);
}

TEST_CASE("Lame parameters from velocities and density") {
    const Grid3D g = make_grid({4, 4, 4}, {1, 1, 1});
    const EarthModel m = constant_model(g, 2000.0f, 1000.0f, 2000.0f);
    auto [lambda, mu] = lame_parameters(m);
    CHECK(mu.at(1, 1, 1) == doctest::Approx(2.0e9).epsilon(1e-6));
    CHECK(lambda.at(1, 1, 1) == doctest::Approx(4.0e9).epsilon(1e-6));

    const EarthModel ac = constant_model(g, 2000.0f, 0.0f, 2000.0f);
    auto [l0, m0] = lame_parameters(ac);
    CHECK(m0.at(2, 2, 2) == 0.0f);
    CHECK(l0.at(2, 2, 2) == doctest::Approx(2000.0 * 2000.0 * 2000.0).epsilon(1e-6));
}

TEST_CASE("lambda + 2 mu = rho vp^2 on a random model") {
    const Grid3D g = make_grid({6, 6, 6}, {1, 1, 1});
    const EarthModel m = random_model(g, 5, true, true);
    auto [lambda, mu] = lame_parameters(m);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 6; ++k) {
                const double want = static_cast<double>(m.rho->at(i, j, k)) * m.vp.at(i, j, k) *
                                    m.vp.at(i, j, k);
                const double got = static_cast<double>(lambda.at(i, j, k)) + 2.0 * mu.at(i, j, k);
                CHECK(std::fabs(got - want) / want <= 1e-6);
            }
}

TEST_CASE("lame_parameters requires vs and rho") {
    const Grid3D g = make_grid({4, 4, 4}, {1, 1, 1});
    const EarthModel m = constant_model(g, 2000.0f);
    CHECK_THROWS_AS(lame_parameters(m), ValidationError);
}

TEST_CASE("save/load round-trips bit-identically") {
    const fs::path dir = temp_dir("model_rt");
    const Grid3D g = make_grid({7, 6, 5}, {10, 12.5, 15});
    const EarthModel m = random_model(g, 77, true, true);
    const std::string manifest = (dir / "model.json").string();
    save_model(m, manifest);
    const EarthModel r = load_model(manifest);
    CHECK(r.grid.n == g.n);
    CHECK(r.grid.d == g.d);
    REQUIRE(r.has_vs());
    REQUIRE(r.has_rho());
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                CHECK(r.vp.at(i, j, k) == m.vp.at(i, j, k));
                CHECK(r.vs->at(i, j, k) == m.vs->at(i, j, k));
                CHECK(r.rho->at(i, j, k) == m.rho->at(i, j, k));
            }
    CHECK(r.vmin == m.vmin);
    CHECK(r.vmax == m.vmax);
    fs::remove_all(dir);
}

TEST_CASE("load_model rejects truncated volumes") {
    const fs::path dir = temp_dir("model_trunc");
    const Grid3D g = make_grid({5, 5, 5}, {1, 1, 1});
    const EarthModel m = constant_model(g, 1500.0f);
    const std::string manifest = (dir / "model.json").string();
    save_model(m, manifest);
    // chop the last sample off the vp volume
    const fs::path vol = dir / "vp.f32";
    REQUIRE(fs::exists(vol));
    fs::resize_file(vol, fs::file_size(vol) - sizeof(float));
    CHECK_THROWS_WITH_AS(load_model(manifest), doctest::Contains("mismatch"), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("model I/O rejects bad paths") {
    const Grid3D g = make_grid({4, 4, 4}, {1, 1, 1});
    const EarthModel m = constant_model(g, 1500.0f);
    CHECK_THROWS_AS(save_model(m, ""), ConfigError);
    CHECK_THROWS_AS(load_model(""), ConfigError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ConfigError);
}

TEST_CASE("velocity bounds shrink under pointwise clamping") {
    const Grid3D g = make_grid({6, 6, 6}, {1, 1, 1});
    EarthModel m = random_model(g, 99, false, false);
    const float lo = m.vmin + 100.0f, hi = m.vmax - 100.0f;
    REQUIRE(lo < hi);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 6; ++k)
                m.vp.at(i, j, k) = std::min(std::max(m.vp.at(i, j, k), lo), hi);
    validate_model(m);
    CHECK(m.vmin >= lo);
    CHECK(m.vmax <= hi);
}

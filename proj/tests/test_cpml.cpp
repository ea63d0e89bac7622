#include <doctest.h>

#include <cmath>
#include <random>

#include "minimod/cpml.hpp"
#include "minimod/propagator.hpp"

using namespace minimod;

TEST_CASE("peak damping follows the reflection-target formula") {
    // nd = 27, h = 20 => L = 540; d0 = 3 * 4500 * ln(1000) / (2 * 540)
    const auto p = build_profile<double>({240, 240, 240}, {20, 20, 20}, {27, 27, 27}, 25.0, 4500.0,
                                         1e-3, 1e-3);
    const double want = 3.0 * 4500.0 * std::log(1000.0) / (2.0 * 540.0);
    CHECK(want == doctest::Approx(86.3469).epsilon(1e-4));
    for (int ax = 0; ax < 3; ++ax) CHECK(p.d0[ax] == doctest::Approx(want).epsilon(1e-12));

    // halving the layer width doubles d0
    const auto half = build_profile<double>({240, 240, 240}, {20, 20, 20}, {27, 13, 27}, 25.0,
                                            4500.0, 1e-3, 1e-3);
    CHECK(half.d0[1] == doctest::Approx(want * 27.0 / 13.0).epsilon(1e-12));
}

TEST_CASE("damping grades quadratically toward the boundary and vanishes inside") {
    const int n = 100, nd = 10;
    const auto p = build_profile<double>({n, n, n}, {20, 20, 20}, {nd, nd, nd}, 25.0, 3000.0, 1e-3);
    const AxisCpml<double>& A = p.axis[0];
    // interior strictly untouched
    for (int i = nd; i < n - nd; ++i) {
        CHECK(A.d[i] == 0.0);
        CHECK(A.a[i] == 0.0);
        CHECK(A.b[i] == 1.0);
        CHECK(A.inv_kappa[i] == 1.0);
    }
    // monotone increase toward each boundary, peaking at d0
    for (int m = 0; m < nd - 1; ++m) {
        CHECK(A.d[m] > A.d[m + 1]);
        CHECK(A.d[n - 1 - m] > A.d[n - 2 - m]);
    }
    CHECK(A.d[0] == doctest::Approx(p.d0[0]).epsilon(1e-12));
    CHECK(A.d[n - 1] == doctest::Approx(p.d0[0]).epsilon(1e-12));
    // quadratic profile: d(m) = d0 ((nd - m)/nd)^2
    for (int m = 0; m < nd; ++m) {
        const double frac = static_cast<double>(nd - m) / nd;
        CHECK(A.d[m] == doctest::Approx(p.d0[0] * frac * frac).epsilon(1e-12));
    }
    // mirror symmetry
    for (int m = 0; m < nd; ++m) CHECK(A.d[m] == doctest::Approx(A.d[n - 1 - m]).epsilon(1e-12));
}

TEST_CASE("frequency shift ramps from pi fmax at the interior edge to zero") {
    const int n = 60, nd = 8;
    const double fmax = 25.0;
    const auto p = build_profile<double>({n, n, n}, {10, 10, 10}, {nd, nd, nd}, fmax, 2000.0, 1e-3);
    const AxisCpml<double>& A = p.axis[2];
    CHECK(A.alpha[0] == doctest::Approx(0.0).scale(1.0)); // boundary
    CHECK(A.alpha[nd - 1] ==
          doctest::Approx(M_PI * fmax * (1.0 - 1.0 / nd)).epsilon(1e-12)); // innermost layer
    for (int m = 0; m < nd - 1; ++m) CHECK(A.alpha[m] < A.alpha[m + 1]);
}

TEST_CASE("recurrence coefficients are a stable decaying filter") {
    const int n = 80, nd = 12;
    const double dt = 8e-4;
    const auto p = build_profile<double>({n, n, n}, {15, 15, 15}, {nd, nd, nd}, 25.0, 4000.0, dt);
    for (int ax = 0; ax < 3; ++ax) {
        const AxisCpml<double>& A = p.axis[ax];
        for (int i = 0; i < n; ++i) {
            CHECK(A.b[i] > 0.0);
            CHECK(A.b[i] <= 1.0);
            CHECK(A.a[i] <= 0.0); // a = d (b - 1)/(d + alpha) <= 0
            CHECK(A.b[i] == doctest::Approx(std::exp(-(A.d[i] + A.alpha[i]) * dt)).epsilon(1e-12));
            if (A.d[i] > 0.0)
                CHECK(A.a[i] == doctest::Approx(A.d[i] * (A.b[i] - 1.0) /
                                                (A.d[i] + A.alpha[i])).epsilon(1e-12));
        }
    }
}

TEST_CASE("free surface leaves the shallow z side undamped") {
    const int n = 50, nd = 6;
    const auto p = build_profile<double>({n, n, n}, {10, 10, 10}, {nd, nd, nd}, 25.0, 2000.0, 1e-3,
                                         1e-3, /*free_surface=*/true);
    const AxisCpml<double>& Z = p.axis[2];
    for (int k = 0; k < nd; ++k) {
        CHECK(Z.d[k] == 0.0);
        CHECK(Z.b[k] == 1.0);
        CHECK(Z.a[k] == 0.0);
        CHECK(Z.d[n - 1 - k] > 0.0); // deep side still damped
    }
    // x and y unaffected by the flag
    for (int m = 0; m < nd; ++m) CHECK(p.axis[0].d[m] > 0.0);
}

TEST_CASE("reflection target must sit strictly inside (0, 1)") {
    CHECK_THROWS_AS(build_profile<float>({10, 10, 10}, {1, 1, 1}, {2, 2, 2}, 25.0, 2000.0, 1e-4,
                                         0.0),
                    ConfigError);
    CHECK_THROWS_AS(build_profile<float>({10, 10, 10}, {1, 1, 1}, {2, 2, 2}, 25.0, 2000.0, 1e-4,
                                         1.0),
                    ConfigError);
    CHECK_THROWS_AS(build_profile<float>({10, 10, 10}, {1, 1, 1}, {2, 2, 2}, 25.0, 2000.0, 1e-4,
                                         -0.5),
                    ConfigError);
}

TEST_CASE("box arrays read zero in the halo until written") {
    IndexBox b;
    b.lo = {4, 4, 4};
    b.hi = {8, 8, 8};
    BoxArray<float> arr(b, 2);
    CHECK(arr.at(2, 4, 4) == 0.0f);
    CHECK(arr.at(9, 9, 9) == 0.0f);
    arr.at(5, 6, 7) = 3.5f;
    CHECK(arr.at(5, 6, 7) == 3.5f);
    CHECK(arr.at(5, 6, 6) == 0.0f);
}

TEST_CASE("free-surface mirror zeroes the plane and antisymmetrizes the ghosts") {
    const Grid3D g = make_grid({8, 8, 8}, {1, 1, 1});
    Field p(g, "p");
    std::mt19937 rng(11);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (auto& v : p.data) v = u(rng);
    apply_free_surface_pressure(p);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            CHECK(p.at(i, j, 0) == 0.0f);
            for (int m = 1; m <= g.radius; ++m) CHECK(p.at(i, j, -m) == -p.at(i, j, m));
        }
}

TEST_CASE("a degenerate recurrence reproduces the undamped engine bitwise") {
    const Grid3D g = make_grid({20, 20, 20}, {10, 10, 10});
    Field vp(g, "vp");
    for (auto& v : vp.data) v = 2000.0f;
    EngineOptions damped;
    damped.ndamping = {5, 5, 5};
    EngineOptions plain; // ndamping stays zero
    const float dt = 1e-3f;

    AcousticCdEngine<float> a(g, {0, 0, 0}, g.n, vp, damped, dt, 2000.0);
    AcousticCdEngine<float> b(g, {0, 0, 0}, g.n, vp, plain, dt, 2000.0);

    // neuter the recurrence: with a = 0, b = 1 the memory variables stay zero
    // and the damping-region update must collapse to the plain stencil
    for (int ax = 0; ax < 3; ++ax) {
        auto& A = a.profile().axis[ax];
        std::fill(A.a.begin(), A.a.end(), 0.0f);
        std::fill(A.b.begin(), A.b.end(), 1.0f);
        std::fill(A.inv_kappa.begin(), A.inv_kappa.end(), 1.0f);
    }

    Field seed_prev(g, "p0"), seed_cur(g, "p1");
    std::mt19937 rng(21);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
            for (int k = 0; k < 20; ++k) {
                seed_prev.at(i, j, k) = 1e-3f * u(rng);
                seed_cur.at(i, j, k) = 1e-3f * u(rng);
            }
    a.set_state(seed_prev, seed_cur);
    b.set_state(seed_prev, seed_cur);

    for (int s = 0; s < 5; ++s) {
        a.step(0.0f, std::nullopt);
        b.step(0.0f, std::nullopt);
    }
    int mismatches = 0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
            for (int k = 0; k < 20; ++k)
                if (a.pressure().at(i, j, k) != b.pressure().at(i, j, k)) ++mismatches;
    CHECK(mismatches == 0);
}

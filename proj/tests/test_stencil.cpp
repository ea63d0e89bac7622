#include <doctest.h>

#include <cmath>
#include <random>

#include "minimod/stencil.hpp"

using namespace minimod;

namespace {

double pow_i(double x, int q) { return q == 0 ? 1.0 : std::pow(x, q); }

// d/dx and d2/dx2 of x^q at x0
double d1_monomial(double x0, int q) { return q == 0 ? 0.0 : q * pow_i(x0, q - 1); }
double d2_monomial(double x0, int q) {
    return q < 2 ? 0.0 : static_cast<double>(q) * (q - 1) * pow_i(x0, q - 2);
}

double rel_err(double got, double want) {
    const double scale = std::max(1.0, std::fabs(want));
    return std::fabs(got - want) / scale;
}

} // namespace

TEST_CASE("radius-1 coefficients are the classic ones") {
    const StencilCoeffs s2 = second_derivative_coeffs(1, 1.0);
    CHECK(s2.c.size() == 1);
    CHECK(s2.c[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s2.center == doctest::Approx(-2.0).epsilon(1e-14));

    const StencilCoeffs s1 = staggered_first_derivative_coeffs(1, 1.0);
    CHECK(s1.c.size() == 1);
    CHECK(s1.c[0] == doctest::Approx(1.0).epsilon(1e-14)); // (f(+1/2) - f(-1/2)) / h
}

TEST_CASE("second-derivative stencils differentiate monomials to their order") {
    // radius 8 is excluded: monomial taps up to 8^16 overflow the f64
    // cancellation budget even though the coefficients are right
    for (int radius : {1, 2, 4}) {
        const StencilCoeffs s = second_derivative_coeffs(radius, 1.0);
        const double x0 = 0.37; // evaluate away from zero so all taps contribute
        for (int q = 0; q <= 2 * radius; ++q) {
            double acc = s.center * pow_i(x0, q);
            for (int m = 1; m <= radius; ++m)
                acc += s.c[m - 1] * (pow_i(x0 + m, q) + pow_i(x0 - m, q));
            CHECK(rel_err(acc, d2_monomial(x0, q)) <= 1e-10);
        }
    }
}

TEST_CASE("staggered stencils are exact to degree 2*radius - 1") {
    for (int radius : {1, 2, 4}) {
        const StencilCoeffs s = staggered_first_derivative_coeffs(radius, 1.0);
        const double x0 = 0.21;
        for (int q = 0; q <= 2 * radius - 1; ++q) {
            double acc = 0.0;
            for (int m = 1; m <= radius; ++m)
                acc += s.c[m - 1] * (pow_i(x0 + (m - 0.5), q) - pow_i(x0 - (m - 0.5), q));
            CHECK(rel_err(acc, d1_monomial(x0, q)) <= 1e-10);
        }
    }
}

TEST_CASE("central first derivative is exact through degree 2*radius") {
    for (int radius : {1, 2, 4}) {
        const StencilCoeffs s = central_first_derivative_coeffs(radius, 1.0);
        const double x0 = 0.43;
        // antisymmetric stencil: even-degree errors vanish identically, so
        // exactness extends one degree past the tap count
        for (int q = 0; q <= 2 * radius; ++q) {
            double acc = 0.0;
            for (int m = 1; m <= radius; ++m)
                acc += s.c[m - 1] * (pow_i(x0 + m, q) - pow_i(x0 - m, q));
            CHECK(rel_err(acc, d1_monomial(x0, q)) <= 1e-10);
        }
    }
}

TEST_CASE("spacing folds into the weights") {
    const StencilCoeffs a = second_derivative_coeffs(4, 1.0);
    const StencilCoeffs b = second_derivative_coeffs(4, 20.0);
    for (int m = 0; m < 4; ++m) CHECK(b.c[m] == doctest::Approx(a.c[m] / 400.0).epsilon(1e-13));
    CHECK(b.center == doctest::Approx(a.center / 400.0).epsilon(1e-13));

    const StencilCoeffs f1 = staggered_first_derivative_coeffs(4, 1.0);
    const StencilCoeffs f2 = staggered_first_derivative_coeffs(4, 2.0);
    for (int m = 0; m < 4; ++m) CHECK(f2.c[m] == doctest::Approx(f1.c[m] / 2.0).epsilon(1e-13));
}

TEST_CASE("center weight is -2 sum of taps") {
    for (int radius : {2, 4}) {
        const StencilCoeffs s = second_derivative_coeffs(radius, 1.0);
        double sum = 0.0;
        for (double c : s.c) sum += c;
        CHECK(s.center == doctest::Approx(-2.0 * sum).epsilon(1e-13));
    }
}

TEST_CASE("coefficient generators reject unsupported radii") {
    CHECK_THROWS_AS(second_derivative_coeffs(0, 1.0), ConfigError);
    CHECK_THROWS_AS(second_derivative_coeffs(9, 1.0), ConfigError);
    CHECK_THROWS_AS(staggered_first_derivative_coeffs(-1, 1.0), ConfigError);
    CHECK_THROWS_AS(second_derivative_coeffs(4, 0.0), ConfigError);
}

namespace {

template <typename T>
FieldT<T> random_field(const Grid3D& g, unsigned seed) {
    FieldT<T> f(g, "p");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : f.data) v = static_cast<T>(u(rng));
    return f;
}

// Independent reference: direct per-point summation from the raw coefficient
// lists, no shared kernel code.
template <typename T>
T naive_laplacian(const FieldT<T>& p, int i, int j, int k, const StencilCoeffs& cx,
                  const StencilCoeffs& cy, const StencilCoeffs& cz) {
    double acc = (cx.center + cy.center + cz.center) * p.at(i, j, k);
    for (int m = 1; m <= cx.radius; ++m) acc += cx.c[m - 1] * (p.at(i + m, j, k) + p.at(i - m, j, k));
    for (int m = 1; m <= cy.radius; ++m) acc += cy.c[m - 1] * (p.at(i, j + m, k) + p.at(i, j - m, k));
    for (int m = 1; m <= cz.radius; ++m) acc += cz.c[m - 1] * (p.at(i, j, k + m) + p.at(i, j, k - m));
    return static_cast<T>(acc);
}

} // namespace

TEST_CASE("apply_laplacian: constants and parabolas") {
    const Grid3D g = make_grid({9, 9, 9}, {20, 20, 20});
    const StencilCoeffs c = second_derivative_coeffs(4, 20.0);
    FieldT<double> out(g, "out");

    FieldT<double> p(g, "p");
    p.fill(7.0);
    apply_laplacian(p, c, c, c, out, g.interior());
    for (int i = 0; i < 9; ++i) CHECK(std::fabs(out.at(i, 4, 4)) <= 1e-12);

    for (int i = -4; i < 13; ++i)
        for (int j = -4; j < 13; ++j)
            for (int k = -4; k < 13; ++k) p.at(i, j, k) = (i * 20.0) * (i * 20.0);
    apply_laplacian(p, c, c, c, out, g.interior());
    for (int i = 0; i < 9; ++i)
        for (int k = 0; k < 9; ++k) CHECK(out.at(i, 3, k) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("apply_laplacian matches the naive oracle on random data") {
    const Grid3D g = make_grid({9, 9, 9}, {1.5, 2.0, 2.5});
    const StencilCoeffs cx = second_derivative_coeffs(4, 1.5);
    const StencilCoeffs cy = second_derivative_coeffs(4, 2.0);
    const StencilCoeffs cz = second_derivative_coeffs(4, 2.5);
    FieldT<double> p = random_field<double>(g, 11);
    FieldT<double> out(g, "out");
    apply_laplacian(p, cx, cy, cz, out, g.interior());
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
            for (int k = 0; k < 9; ++k) {
                const double want = naive_laplacian(p, i, j, k, cx, cy, cz);
                CHECK(rel_err(out.at(i, j, k), want) <= 1e-12);
            }
}

TEST_CASE("apply_laplacian is linear") {
    const Grid3D g = make_grid({8, 8, 8}, {1, 1, 1});
    const StencilCoeffs c = second_derivative_coeffs(4, 1.0);
    FieldT<double> p = random_field<double>(g, 21), q = random_field<double>(g, 22);
    const double alpha = 0.6180339887, beta = -1.4142135623;
    FieldT<double> mix(g, "mix"), lp(g, "lp"), lq(g, "lq"), lmix(g, "lmix");
    for (std::size_t i = 0; i < mix.data.size(); ++i)
        mix.data[i] = alpha * p.data[i] + beta * q.data[i];
    apply_laplacian(p, c, c, c, lp, g.interior());
    apply_laplacian(q, c, c, c, lq, g.interior());
    apply_laplacian(mix, c, c, c, lmix, g.interior());
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int k = 0; k < 8; ++k)
                CHECK(lmix.at(i, j, k) ==
                      doctest::Approx(alpha * lp.at(i, j, k) + beta * lq.at(i, j, k))
                          .epsilon(1e-12));
}

TEST_CASE("apply_laplacian commutes with reflection") {
    const Grid3D g = make_grid({8, 8, 8}, {1, 1, 1});
    const StencilCoeffs c = second_derivative_coeffs(4, 1.0);
    FieldT<double> p = random_field<double>(g, 31);
    FieldT<double> pr(g, "pr");
    auto mirror = [](int v) { return 7 - v; };
    for (int i = -4; i < 12; ++i)
        for (int j = -4; j < 12; ++j)
            for (int k = -4; k < 12; ++k) pr.at(mirror(i), j, k) = p.at(i, j, k);
    FieldT<double> lp(g, "lp"), lpr(g, "lpr");
    apply_laplacian(p, c, c, c, lp, g.interior());
    apply_laplacian(pr, c, c, c, lpr, g.interior());
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int k = 0; k < 8; ++k)
                CHECK(lpr.at(mirror(i), j, k) == doctest::Approx(lp.at(i, j, k)).epsilon(1e-13));
}

TEST_CASE("staggered derivative: constants and linears") {
    const Grid3D g = make_grid({9, 9, 9}, {2, 2, 2});
    const StencilCoeffs c = staggered_first_derivative_coeffs(4, 2.0);
    FieldT<double> f(g, "f"), out(g, "out");
    f.fill(3.25);
    apply_staggered_derivative(f, 0, DerivDir::Forward, c, out, g.interior());
    CHECK(std::fabs(out.at(4, 4, 4)) <= 1e-13);

    for (int i = -4; i < 13; ++i)
        for (int j = -4; j < 13; ++j)
            for (int k = -4; k < 13; ++k) f.at(i, j, k) = 5.0 * (i * 2.0) + 1.0;
    apply_staggered_derivative(f, 0, DerivDir::Forward, c, out, g.interior());
    CHECK(out.at(4, 4, 4) == doctest::Approx(5.0).epsilon(1e-12));
    apply_staggered_derivative(f, 0, DerivDir::Backward, c, out, g.interior());
    CHECK(out.at(4, 4, 4) == doctest::Approx(5.0).epsilon(1e-12));
}

namespace {

// Periodic wrap of the interior into the ghost shells along every axis.
template <typename T>
void fill_ghosts_periodic(FieldT<T>& f) {
    const Grid3D& g = f.grid;
    const int r = g.radius;
    auto wrap = [](int v, int n) { return ((v % n) + n) % n; };
    for (int i = -r; i < g.n[0] + r; ++i)
        for (int j = -r; j < g.n[1] + r; ++j)
            for (int k = -r; k < g.n[2] + r; ++k) {
                if (i >= 0 && i < g.n[0] && j >= 0 && j < g.n[1] && k >= 0 && k < g.n[2])
                    continue;
                f.at(i, j, k) = f.at(wrap(i, g.n[0]), wrap(j, g.n[1]), wrap(k, g.n[2]));
            }
}

} // namespace

TEST_CASE("forward and backward staggered derivatives are adjoint on a periodic grid") {
    const Grid3D g = make_grid({16, 16, 16}, {1.0, 1.0, 1.0});
    FieldT<double> f = random_field<double>(g, 41), h = random_field<double>(g, 42);
    fill_ghosts_periodic(f);
    fill_ghosts_periodic(h);
    const StencilCoeffs c = staggered_first_derivative_coeffs(4, 1.0);
    for (int axis = 0; axis < 3; ++axis) {
        FieldT<double> df(g, "df"), dh(g, "dh");
        apply_staggered_derivative(f, axis, DerivDir::Forward, c, df, g.interior());
        apply_staggered_derivative(h, axis, DerivDir::Backward, c, dh, g.interior());
        double lhs = 0.0, rhs = 0.0, norm = 0.0;
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j)
                for (int k = 0; k < 16; ++k) {
                    lhs += df.at(i, j, k) * h.at(i, j, k);
                    rhs += f.at(i, j, k) * dh.at(i, j, k);
                    norm += std::fabs(df.at(i, j, k) * h.at(i, j, k));
                }
        CHECK(std::fabs(lhs + rhs) / std::max(norm, 1.0) <= 1e-12); // <Df,h> = -<f,D'h>
    }
}

TEST_CASE("apply_* reject boxes outside the interior") {
    const Grid3D g = make_grid({8, 8, 8}, {1, 1, 1});
    const StencilCoeffs c2 = second_derivative_coeffs(4, 1.0);
    const StencilCoeffs c1 = staggered_first_derivative_coeffs(4, 1.0);
    FieldT<double> p(g, "p"), out(g, "out");
    const IndexBox bad{{0, 0, 0}, {9, 8, 8}};
    CHECK_THROWS_AS(apply_laplacian(p, c2, c2, c2, out, bad), std::invalid_argument);
    CHECK_THROWS_AS(apply_staggered_derivative(p, 0, DerivDir::Forward, c1, out, bad),
                    std::invalid_argument);
}

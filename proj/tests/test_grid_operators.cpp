#include "cksf/errors.hpp"
#include "cksf/operators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cksf;

namespace {

ScalarField field_from(const Grid2D& g, const oracle::Vec& v) { return ScalarField(g, v); }

Grid2D random_grid(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size(4, 8);
    std::uniform_real_distribution<double> len(0.5, 2.0);
    return Grid2D(size(rng), size(rng), len(rng), len(rng));
}

} // namespace

TEST_CASE("grid rejects degenerate shapes") {
    CHECK_THROWS_AS(Grid2D(3, 8, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(Grid2D(8, 8, 0.0, 1.0), InvalidArgument);
    const Grid2D g(5, 4, 2.0, 1.0);
    CHECK(g.hx() == doctest::Approx(0.4));
    CHECK(g.x_faces() == 24u);
    CHECK(g.y_faces() == 25u);
    CHECK(g.cell(2, 3) == 17u);
    CHECK_THROWS_AS(ScalarField(g, std::vector<double>(19)), GridMismatch);
}

TEST_CASE("integrate_cellwise matches a double loop and is linear") {
    std::mt19937_64 rng(11);
    const Grid2D g(7, 5, 1.3, 0.7);
    const auto a = oracle::uniform(rng, g.cells(), -1, 2);
    const auto b = oracle::uniform(rng, g.cells(), -1, 2);
    double ref = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) ref += a[i + 7 * j] * g.hx() * g.hy();
    CHECK(integrate_cellwise(field_from(g, a)) == doctest::Approx(ref).epsilon(1e-14));

    oracle::Vec mix(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) mix[k] = 2.0 * a[k] - 3.0 * b[k];
    const double lhs = integrate_cellwise(field_from(g, mix));
    const double rhs = 2.0 * integrate_cellwise(field_from(g, a)) - 3.0 * integrate_cellwise(field_from(g, b));
    CHECK(std::abs(lhs - rhs) < 1e-13);
}

TEST_CASE("sensitivity examples") {
    SimParams p;
    p.c_s = 1.0;
    p.alpha = -0.5;
    CHECK(sensitivity(0.0, p) == 1.0);
    CHECK(sensitivity(1.0, p) == doctest::Approx(1.4142135623730951));
    p.c_s = 2.0;
    p.alpha = 1.0;
    CHECK(sensitivity(3.0, p) == doctest::Approx(0.5));
    CHECK_THROWS_AS(sensitivity(-0.1, p), NegativeDensity);
}

TEST_CASE("trivial operator cases") {
    const Grid2D g(4, 4, 1.0, 1.0);
    SimParams p;
    const ScalarField five(g, FieldKind::generic, 5.0);
    CHECK(laplacian_neumann(five).max_abs() == 0.0);
    CHECK(gradient_faces(five).max_abs() == 0.0);

    ScalarField ramp(g);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) ramp(i, j) = 3.0 * g.x_center(i);
    const FaceField gr = gradient_faces(ramp);
    for (int j = 0; j < 4; ++j) {
        CHECK(gr.x(0, j) == 0.0);
        CHECK(gr.x(4, j) == 0.0);
        for (int i = 1; i < 4; ++i) CHECK(gr.x(i, j) == doctest::Approx(3.0));
    }

    MacVelocity u(g);
    CHECK(divergence_mac(u).max_abs() == 0.0);
    CHECK(advect_scalar(five, u).max_abs() == 0.0);
    for (int j = 0; j < 4; ++j)
        for (int i = 1; i < 4; ++i) u.x(i, j) = 1.0;
    const ScalarField div = divergence_mac(u);
    for (int j = 0; j < 4; ++j) {
        CHECK(div(0, j) == doctest::Approx(4.0));
        CHECK(div(1, j) == 0.0);
        CHECK(div(2, j) == 0.0);
        CHECK(div(3, j) == doctest::Approx(-4.0));
    }

    std::mt19937_64 rng(1);
    const ScalarField zero(g);
    const ScalarField c(g, oracle::uniform(rng, g.cells(), 0, 1));
    CHECK(chemotaxis_divergence(zero, c, p).max_abs() == 0.0);
    CHECK(integrate_cellwise(zero) == 0.0);
    CHECK(integrate_cellwise(ScalarField(g, FieldKind::generic, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("laplacian matches padded-ghost oracle on random grids") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const Grid2D g = random_grid(rng);
        const auto f = oracle::uniform(rng, g.cells(), -3, 3);
        const ScalarField lap = laplacian_neumann(field_from(g, f));
        const auto ref = oracle::laplacian(oracle::Mesh(g), f);
        CHECK(oracle::max_diff(lap.values(), ref) <= 1e-12 * oracle::max_abs(ref));
    }
}

TEST_CASE("laplacian: cosine modes are eigenvectors") {
    const Grid2D g(12, 9, 1.0, 1.5);
    const double pi = std::numbers::pi;
    for (int kx = 0; kx < 3; ++kx) {
        for (int ky = 0; ky < 3; ++ky) {
            ScalarField f(g);
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i)
                    f(i, j) = std::cos(pi * kx * (i + 0.5) / g.nx()) * std::cos(pi * ky * (j + 0.5) / g.ny());
            const double lam = 2.0 / (g.hx() * g.hx()) * (1 - std::cos(pi * kx / g.nx())) +
                               2.0 / (g.hy() * g.hy()) * (1 - std::cos(pi * ky / g.ny()));
            const ScalarField lap = laplacian_neumann(f);
            for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::abs(lap[k] + lam * f[k]) <= 1e-12 * (1 + lam));
        }
    }
}

TEST_CASE("laplacian: spike stencil, symmetry, dissipation, conservation") {
    const Grid2D g(6, 6, 1.0, 1.0);
    ScalarField spike(g);
    spike(2, 3) = 1.0;
    const ScalarField ls = laplacian_neumann(spike);
    const double ih2 = 1.0 / (g.hx() * g.hx());
    CHECK(ls(2, 3) == doctest::Approx(-4 * ih2));
    CHECK(ls(1, 3) == doctest::Approx(ih2));
    CHECK(ls(2, 4) == doctest::Approx(ih2));
    CHECK(ls(0, 0) == 0.0);

    ScalarField corner(g);
    corner(0, 0) = 1.0;
    CHECK(laplacian_neumann(corner)(0, 0) == doctest::Approx(-2 * ih2));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const ScalarField a(g, oracle::uniform(rng, g.cells(), -1, 1));
        const ScalarField b(g, oracle::uniform(rng, g.cells(), -1, 1));
        const double ab = cell_dot(laplacian_neumann(a), b);
        const double ba = cell_dot(a, laplacian_neumann(b));
        CHECK(std::abs(ab - ba) <= 1e-12 * std::abs(ab) + 1e-10);
        CHECK(cell_dot(laplacian_neumann(a), a) <= 0.0);
        CHECK(std::abs(integrate_cellwise(laplacian_neumann(a))) < 1e-11);
    }
}

TEST_CASE("gradient and divergence match hand-rolled differences") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid2D g = random_grid(rng);
        const oracle::Mesh m(g);
        const auto f = oracle::uniform(rng, g.cells(), -1, 1);
        const FaceField grad = gradient_faces(field_from(g, f));
        CHECK(grad.boundary_is_zero());
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 1; i < g.nx(); ++i)
                CHECK(grad.x(i, j) == doctest::Approx((f[m.at(i, j)] - f[m.at(i - 1, j)]) / g.hx()));

        const MacVelocity u = oracle::random_velocity(g, rng, 2.0);
        const auto ref = oracle::divergence(m, oracle::to_vec(u.xs()), oracle::to_vec(u.ys()));
        CHECK(oracle::max_diff(divergence_mac(u).values(), ref) <= 1e-12 * oracle::max_abs(ref));
        // Discrete summation by parts: sum(div u) = 0 for zero boundary flux.
        CHECK(std::abs(integrate_cellwise(divergence_mac(u))) < 1e-12);
    }
}

TEST_CASE("advect_scalar matches donor-cell oracle and conserves mass") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const Grid2D g = random_grid(rng);
        const auto f = oracle::uniform(rng, g.cells(), 0, 4);
        const MacVelocity u = oracle::random_velocity(g, rng, 1.5);
        const ScalarField adv = advect_scalar(field_from(g, f), u);
        const auto ref = oracle::advect(oracle::Mesh(g), f, oracle::to_vec(u.xs()), oracle::to_vec(u.ys()));
        CHECK(oracle::max_diff(adv.values(), ref) <= 1e-12 * oracle::max_abs(ref));
        CHECK(std::abs(integrate_cellwise(adv)) < 1e-12);
    }
}

TEST_CASE("advecting a constant with a solenoidal field does nothing") {
    std::mt19937_64 rng(3);
    const Grid2D g(8, 6, 1.0, 0.75);
    const MacVelocity u = oracle::random_solenoidal(g, rng, 0.1);
    const ScalarField one(g, FieldKind::generic, 2.5);
    CHECK(advect_scalar(one, u).max_abs() < 1e-12);
}

TEST_CASE("advect_scalar two-cell exchange") {
    const Grid2D g(4, 4, 4.0, 4.0);
    ScalarField f(g);
    f(1, 1) = 3.0;
    MacVelocity u(g);
    u.x(2, 1) = 0.5; // from cell (1,1) into (2,1)
    const ScalarField adv = advect_scalar(f, u);
    CHECK(adv(1, 1) == doctest::Approx(1.5));
    CHECK(adv(2, 1) == doctest::Approx(-1.5));
    CHECK(adv(0, 1) == 0.0);
}

TEST_CASE("chemotaxis divergence matches face-by-face oracle") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> alpha(-0.95, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Grid2D g = random_grid(rng);
        SimParams p;
        p.alpha = alpha(rng);
        p.c_s = 0.7;
        const auto n = oracle::uniform(rng, g.cells(), 0, 5);
        const auto c = oracle::uniform(rng, g.cells(), 0, 1);
        const ScalarField div = chemotaxis_divergence(field_from(g, n), field_from(g, c), p);
        const auto ref = oracle::chemotaxis(oracle::Mesh(g), n, c, p.c_s, p.alpha);
        CHECK(oracle::max_diff(div.values(), ref) <= 1e-12 * oracle::max_abs(ref));
        CHECK(std::abs(integrate_cellwise(div)) < 1e-11);
    }
}

TEST_CASE("chemotaxis: flat signal gives zero flux, negative n throws") {
    const Grid2D g(5, 5, 1.0, 1.0);
    SimParams p;
    const ScalarField n(g, FieldKind::density, 2.0);
    const ScalarField c(g, FieldKind::concentration, 0.3);
    CHECK(chemotaxis_flux(n, c, p).max_abs() == 0.0);
    CHECK(max_chemotactic_drift(n, c, p) == 0.0);
    ScalarField bad = n;
    bad(1, 1) = -1e-3;
    CHECK_THROWS_AS(chemotaxis_divergence(bad, c, p), NegativeDensity);
}

TEST_CASE("max_outflow_rate: explicit transport step stays nonnegative at the bound") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const Grid2D g = random_grid(rng);
        SimParams p;
        const ScalarField n(g, oracle::uniform(rng, g.cells(), 0, 5));
        const ScalarField c(g, oracle::uniform(rng, g.cells(), 0, 1));
        const MacVelocity u = oracle::random_velocity(g, rng, 1.0);
        const double rate = max_outflow_rate(n, c, u, p);
        REQUIRE(rate > 0.0);
        const double dt = 1.0 / rate;
        const ScalarField adv = advect_scalar(n, u);
        const ScalarField chem = chemotaxis_divergence(n, c, p);
        for (std::size_t k = 0; k < n.size(); ++k) CHECK(n[k] - dt * (adv[k] + chem[k]) >= -1e-12);
    }
}

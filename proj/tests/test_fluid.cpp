#include "cksf/errors.hpp"
#include "cksf/fluid.hpp"
#include "cksf/operators.hpp"
#include "cksf/spectral.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

using namespace cksf;

namespace {

double face_dot(const FaceField& a, const FaceField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.xs().size(); ++k) s += a.xs()[k] * b.xs()[k];
    for (std::size_t k = 0; k < a.ys().size(); ++k) s += a.ys()[k] * b.ys()[k];
    return s;
}

double kinetic(const MacVelocity& u) { return face_dot(u, u) * u.grid().cell_area(); }

// Upwind (u . grad) u written against explicitly ghosted component arrays.
FaceField convective_oracle(const MacVelocity& u, double kappa) {
    const Grid2D& g = u.grid();
    const int nx = g.nx(), ny = g.ny();
    FaceField out(g);
    auto up = [](double s, double back, double here, double fwd, double h) {
        return s > 0 ? (here - back) / h : (s < 0 ? (fwd - here) / h : 0.0);
    };
    // ux with one ghost row below and above: ghost = -interior (no slip).
    std::vector<double> X(static_cast<std::size_t>(nx + 1) * (ny + 2));
    auto Xat = [&](int i, int j) -> double& { return X[i + (nx + 1) * (j + 1)]; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i) Xat(i, j) = u.x(i, j);
    for (int i = 0; i <= nx; ++i) {
        Xat(i, -1) = -u.x(i, 0);
        Xat(i, ny) = -u.x(i, ny - 1);
    }
    std::vector<double> Y(static_cast<std::size_t>(nx + 2) * (ny + 1));
    auto Yat = [&](int i, int j) -> double& { return Y[(i + 1) + (nx + 2) * j]; };
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) Yat(i, j) = u.y(i, j);
        Yat(-1, j) = -u.y(0, j);
        Yat(nx, j) = -u.y(nx - 1, j);
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double a = Xat(i, j);
            const double v = (u.y(i - 1, j) + u.y(i, j) + u.y(i - 1, j + 1) + u.y(i, j + 1)) / 4;
            out.x(i, j) = kappa * (a * up(a, Xat(i - 1, j), a, Xat(i + 1, j), g.hx()) +
                                   v * up(v, Xat(i, j - 1), a, Xat(i, j + 1), g.hy()));
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double b = Yat(i, j);
            const double w = (u.x(i, j - 1) + u.x(i + 1, j - 1) + u.x(i, j) + u.x(i + 1, j)) / 4;
            out.y(i, j) = kappa * (w * up(w, Yat(i - 1, j), b, Yat(i + 1, j), g.hx()) +
                                   b * up(b, Yat(i, j - 1), b, Yat(i, j + 1), g.hy()));
        }
    }
    return out;
}

} // namespace

TEST_CASE("axis eigenvalues diagonalize the 1-D stencils") {
    const double pi = std::numbers::pi;
    const int n = 7;
    const double h = 0.3;
    struct Case {
        AxisBoundary b;
        std::function<double(int, int)> mode;
    };
    const Case cases[] = {
        {AxisBoundary::neumann_cells, [&](int k, int i) { return std::cos(pi * k * (i + 0.5) / n); }},
        {AxisBoundary::dirichlet_nodes, [&](int k, int i) { return std::sin(pi * (k + 1) * (i + 1) / (n + 1)); }},
        {AxisBoundary::dirichlet_walls, [&](int k, int i) { return std::sin(pi * (k + 1) * (i + 0.5) / n); }},
    };
    for (const Case& c : cases) {
        const auto lam = SpectralSolver::axis_eigenvalues(n, h, c.b);
        REQUIRE(lam.size() == static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            // n x 1 block: the y axis has a single Neumann cell, so L is 1-D.
            std::vector<double> v(n), lv(n);
            for (int i = 0; i < n; ++i) v[i] = c.mode(k, i);
            apply_block_laplacian(v, lv, n, 1, h, 1.0, c.b, AxisBoundary::neumann_cells);
            for (int i = 0; i < n; ++i) CHECK(lv[i] == doctest::Approx(-lam[k] * v[i]).scale(1.0));
        }
    }
}

TEST_CASE("spectral solver inverts the shifted block operator") {
    std::mt19937_64 rng(21);
    const AxisBoundary kinds[] = {AxisBoundary::neumann_cells, AxisBoundary::dirichlet_nodes,
                                  AxisBoundary::dirichlet_walls};
    for (AxisBoundary bx : kinds) {
        for (AxisBoundary by : kinds) {
            const int nx = 6, ny = 5;
            SpectralSolver s(nx, ny, 0.2, 0.25, bx, by);
            const auto x = oracle::uniform(rng, nx * ny, -1, 1);
            std::vector<double> lx(x.size()), b(x.size()), y(x.size());
            apply_block_laplacian(x, lx, nx, ny, 0.2, 0.25, bx, by);
            for (std::size_t k = 0; k < x.size(); ++k) b[k] = 1.5 * x[k] - 0.01 * lx[k];
            s.solve(b, y, 1.5, 0.01);
            CHECK(oracle::max_diff(x, y) < 1e-12);
        }
    }
}

TEST_CASE("pressure Poisson: recovers a mean-zero potential") {
    std::mt19937_64 rng(22);
    const Grid2D g(16, 12, 1.0, 0.8);
    PoissonWorkspace ws(g);
    auto q = oracle::uniform(rng, g.cells(), -1, 1);
    double mean = 0.0;
    for (double v : q) mean += v / q.size();
    for (double& v : q) v -= mean;
    const ScalarField rhs = laplacian_neumann(ScalarField(g, q));
    const ScalarField p = pressure_poisson_solve(rhs, ws, 1e-12);
    CHECK(oracle::max_diff(p.values(), q) < 1e-9);

    const ScalarField ones(g, FieldKind::generic, 1.0);
    CHECK(pressure_poisson_solve(ones, ws, 1e-12).max_abs() < 1e-12);
}

TEST_CASE("implicit diffusion solve matches a dense solve") {
    std::mt19937_64 rng(23);
    const Grid2D g(6, 5, 1.0, 1.0);
    PoissonWorkspace ws(g);
    const auto b = oracle::uniform(rng, g.cells(), 0, 2);
    for (double shift : {0.0, 0.01}) {
        const ScalarField x = implicit_diffusion_solve(ScalarField(g, b), shift, 0.01, ws, 1e-13);
        const auto ref = oracle::solve_shifted(oracle::Mesh(g), 1.0 + shift, 0.01, b);
        CHECK(oracle::max_diff(x.values(), ref) < 1e-11);
    }
}

TEST_CASE("projection: divergence-free, idempotent, annihilates gradients") {
    std::mt19937_64 rng(24);
    const Grid2D g(20, 16, 1.0, 0.8);
    PoissonWorkspace ws(g);
    const double tol = 1e-10, dt = 0.01;
    const MacVelocity u_star = oracle::random_velocity(g, rng, 1.0);
    const Projection once = project(u_star, dt, ws, tol);
    CHECK(divergence_mac(once.u).max_abs() <= 10 * tol * (1 + once.u.max_abs()));
    CHECK(once.u.boundary_is_zero());
    CHECK(std::abs(integrate_cellwise(once.p)) < 1e-12 * (1 + once.p.max_abs()));

    const Projection twice = project(once.u, dt, ws, tol);
    CHECK(oracle::max_diff(twice.u.xs(), once.u.xs()) < 1e-9);
    CHECK(oracle::max_diff(twice.u.ys(), once.u.ys()) < 1e-9);

    const FaceField grad = gradient_faces(ScalarField(g, oracle::uniform(rng, g.cells(), -1, 1)));
    CHECK(project(grad, dt, ws, tol).u.max_abs() < 1e-8);

    // Orthogonality: the projection never increases kinetic energy.
    CHECK(kinetic(once.u) <= kinetic(u_star));
}

TEST_CASE("velocity Laplacian is symmetric negative definite on interior faces") {
    std::mt19937_64 rng(25);
    const Grid2D g(7, 6, 1.0, 1.2);
    for (int trial = 0; trial < 5; ++trial) {
        const MacVelocity a = oracle::random_velocity(g, rng, 1.0);
        const MacVelocity b = oracle::random_velocity(g, rng, 1.0);
        const double ab = face_dot(velocity_laplacian(a), b);
        const double ba = face_dot(a, velocity_laplacian(b));
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(face_dot(velocity_laplacian(a), a) < 0.0);
        CHECK(velocity_laplacian(a).boundary_is_zero());
    }
}

TEST_CASE("implicit viscous solve satisfies its equation") {
    std::mt19937_64 rng(26);
    const Grid2D g(12, 10, 1.0, 1.0);
    PoissonWorkspace ws(g);
    const MacVelocity b = oracle::random_velocity(g, rng, 1.0);
    const double dt = 0.02;
    const MacVelocity x = implicit_viscous_solve(b, dt, ws, 1e-12);
    const FaceField lx = velocity_laplacian(x);
    double worst = 0.0;
    for (std::size_t k = 0; k < b.xs().size(); ++k) worst = std::max(worst, std::abs(x.xs()[k] - dt * lx.xs()[k] - b.xs()[k]));
    for (std::size_t k = 0; k < b.ys().size(); ++k) worst = std::max(worst, std::abs(x.ys()[k] - dt * lx.ys()[k] - b.ys()[k]));
    CHECK(worst < 1e-10);
    CHECK(x.boundary_is_zero());
}

TEST_CASE("buoyancy and convection oracles") {
    std::mt19937_64 rng(27);
    const Grid2D g(6, 7, 1.0, 1.4);
    SimParams p;
    p.phi_gradient = {0.3, -2.0};
    const ScalarField n(g, oracle::uniform(rng, g.cells(), 0, 2));
    const ScalarField m(g, oracle::uniform(rng, g.cells(), 0, 2));
    const FaceField f = buoyancy_force(n, m, p);
    CHECK(f.boundary_is_zero());
    CHECK(f.x(3, 2) == doctest::Approx(0.3 * 0.5 * (n(2, 2) + m(2, 2) + n(3, 2) + m(3, 2))));
    CHECK(f.y(1, 4) == doctest::Approx(-2.0 * 0.5 * (n(1, 3) + m(1, 3) + n(1, 4) + m(1, 4))));

    for (int trial = 0; trial < 10; ++trial) {
        const MacVelocity u = oracle::random_velocity(g, rng, 1.0);
        p.kappa = 1.7;
        const FaceField conv = convective_term(u, p);
        const FaceField ref = convective_oracle(u, 1.7);
        CHECK(oracle::max_diff(conv.xs(), ref.xs()) < 1e-12);
        CHECK(oracle::max_diff(conv.ys(), ref.ys()) < 1e-12);
        p.kappa = 0.0;
        CHECK(convective_term(u, p).max_abs() == 0.0);
    }
}

TEST_CASE("fluid_step: hydrostatic rest stays at rest") {
    const Grid2D g(16, 16, 1.0, 1.0);
    PoissonWorkspace ws(g);
    SimParams p;
    p.kappa = 0.0;
    SimState s(g);
    s.n = ScalarField(g, FieldKind::density, 1.3);
    s.m = ScalarField(g, FieldKind::density, 0.4);
    for (int k = 0; k < 100; ++k) {
        Projection r = fluid_step(s, 1e-3, p, ws);
        s.u = std::move(r.u);
        s.p = std::move(r.p);
    }
    CHECK(s.u.max_abs() <= 10 * p.poisson_tol);
}

TEST_CASE("fluid_step: unforced Stokes flow loses energy, keeps no-slip") {
    std::mt19937_64 rng(28);
    const Grid2D g(16, 16, 1.0, 1.0);
    PoissonWorkspace ws(g);
    SimParams p;
    p.kappa = 0.0;
    p.phi_gradient = {0.0, 0.0};
    SimState s(g);
    s.u = oracle::random_solenoidal(g, rng, 0.05);
    double e = kinetic(s.u);
    for (int k = 0; k < 20; ++k) {
        s.u = fluid_step(s, 1e-3, p, ws).u;
        const double e_new = kinetic(s.u);
        CHECK(e_new <= e);
        CHECK(s.u.boundary_is_zero());
        e = e_new;
    }
}

TEST_CASE("fluid trivial cases") {
    const Grid2D g(4, 4, 1.0, 1.0);
    PoissonWorkspace ws(g);
    SimParams p;
    const ScalarField zero(g);
    CHECK(buoyancy_force(zero, zero, p).max_abs() == 0.0);
    const ScalarField half(g, FieldKind::density, 0.5);
    const FaceField f = buoyancy_force(half, half, p);
    for (int j = 1; j < 4; ++j)
        for (int i = 0; i < 4; ++i) CHECK(f.y(i, j) == doctest::Approx(-1.0));
    CHECK(oracle::max_abs(oracle::to_vec(f.xs())) == 0.0);
    CHECK(convective_term(MacVelocity(g), p).max_abs() == 0.0);
    CHECK(pressure_poisson_solve(zero, ws, 1e-10).max_abs() == 0.0);
    const Projection pz = project(MacVelocity(g), 0.1, ws, 1e-10);
    CHECK(pz.u.max_abs() == 0.0);
    CHECK(pz.p.max_abs() == 0.0);
    const SimState rest(g);
    const Projection pr = fluid_step(rest, 0.1, p, ws);
    CHECK(pr.u.max_abs() == 0.0);
    CHECK(pr.p.max_abs() == 0.0);
}

TEST_CASE("fluid_step: convective difference is first order in dt") {
    const Grid2D g(16, 16, 1.0, 1.0);
    PoissonWorkspace ws(g);
    SimParams p;
    p.phi_gradient = {0.0, 0.0};
    p.poisson_tol = 1e-13;
    p.implicit_tol = 1e-13;
    SimState s(g);
    // Smooth cellular flow so dt * |L| stays small on the resolved modes.
    oracle::Vec psi(17 * 17);
    for (int j = 0; j <= 16; ++j)
        for (int i = 0; i <= 16; ++i)
            psi[i + 17 * j] = 0.05 * std::pow(std::sin(std::numbers::pi * i / 16) * std::sin(std::numbers::pi * j / 16), 2);
    s.u = oracle::from_streamfunction(g, psi);
    auto gap = [&](double dt) {
        SimParams p1 = p, p0 = p;
        p1.kappa = 1.0;
        p0.kappa = 0.0;
        const MacVelocity a = fluid_step(s, dt, p1, ws).u;
        const MacVelocity b = fluid_step(s, dt, p0, ws).u;
        return std::max(oracle::max_diff(a.xs(), b.xs()), oracle::max_diff(a.ys(), b.ys()));
    };
    const double r1 = gap(2e-4) / gap(4e-4);
    const double r2 = gap(1e-4) / gap(2e-4);
    CHECK(r1 == doctest::Approx(0.5).epsilon(0.05));
    CHECK(r2 == doctest::Approx(0.5).epsilon(0.05));
    CHECK(std::abs(r2 - 0.5) <= std::abs(r1 - 0.5) + 1e-6);
}

TEST_CASE("fluid_step: CFL guard") {
    const Grid2D g(8, 8, 1.0, 1.0);
    PoissonWorkspace ws(g);
    SimParams p;
    SimState s(g);
    s.u.x(4, 4) = 100.0;
    CHECK_THROWS_AS(fluid_step(s, 0.01, p, ws), CflViolation);
}

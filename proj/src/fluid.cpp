#include "cksf/fluid.hpp"

#include "cksf/errors.hpp"
#include "cksf/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cksf {

PoissonWorkspace::PoissonWorkspace(const Grid2D& grid)
    : grid_(grid),
      cells_(grid.nx(), grid.ny(), grid.hx(), grid.hy(), AxisBoundary::neumann_cells, AxisBoundary::neumann_cells),
      x_faces_(grid.nx() - 1, grid.ny(), grid.hx(), grid.hy(), AxisBoundary::dirichlet_nodes,
               AxisBoundary::dirichlet_walls),
      y_faces_(grid.nx(), grid.ny() - 1, grid.hx(), grid.hy(), AxisBoundary::dirichlet_walls,
               AxisBoundary::dirichlet_nodes) {}

FaceField buoyancy_force(const ScalarField& n, const ScalarField& m, const SimParams& params) {
    const Grid2D& g = n.grid();
    if (!(m.grid() == g)) throw GridMismatch("buoyancy: n and m grids differ");
    FaceField force(g);
    const double gx = params.phi_gradient[0];
    const double gy = params.phi_gradient[1];
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) {
            force.x(i, j) = 0.5 * ((n(i - 1, j) + m(i - 1, j)) + (n(i, j) + m(i, j))) * gx;
        }
    }
    for (int j = 1; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            force.y(i, j) = 0.5 * ((n(i, j - 1) + m(i, j - 1)) + (n(i, j) + m(i, j))) * gy;
        }
    }
    return force;
}

namespace {

inline double upwind_derivative(double speed, double behind, double here, double ahead, double h) {
    if (speed > 0.0) return (here - behind) / h;
    if (speed < 0.0) return (ahead - here) / h;
    return 0.0;
}

} // namespace

FaceField convective_term(const MacVelocity& u, const SimParams& params) {
    const Grid2D& g = u.grid();
    FaceField out(g);
    if (params.kappa == 0.0) return out;
    const int nx = g.nx();
    const int ny = g.ny();
    const double hx = g.hx();
    const double hy = g.hy();
    const double kappa = params.kappa;

    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double a = u.x(i, j);
            const double v = 0.25 * (u.y(i - 1, j) + u.y(i, j) + u.y(i - 1, j + 1) + u.y(i, j + 1));
            // No-slip walls: tangential ghost is the negated value.
            const double below = j > 0 ? u.x(i, j - 1) : -a;
            const double above = j < ny - 1 ? u.x(i, j + 1) : -a;
            const double ddx = upwind_derivative(a, u.x(i - 1, j), a, u.x(i + 1, j), hx);
            const double ddy = upwind_derivative(v, below, a, above, hy);
            out.x(i, j) = kappa * (a * ddx + v * ddy);
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double b = u.y(i, j);
            const double w = 0.25 * (u.x(i, j - 1) + u.x(i + 1, j - 1) + u.x(i, j) + u.x(i + 1, j));
            const double left = i > 0 ? u.y(i - 1, j) : -b;
            const double right = i < nx - 1 ? u.y(i + 1, j) : -b;
            const double ddx = upwind_derivative(w, left, b, right, hx);
            const double ddy = upwind_derivative(b, u.y(i, j - 1), b, u.y(i, j + 1), hy);
            out.y(i, j) = kappa * (w * ddx + b * ddy);
        }
    }
    return out;
}

namespace {

// Interior x faces (i = 1..nx-1) and y faces (j = 1..ny-1) packed x fastest.
std::vector<double> pack_x(const FaceField& f) {
    const Grid2D& g = f.grid();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(g.nx() - 1) * g.ny());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) out.push_back(f.x(i, j));
    return out;
}

std::vector<double> pack_y(const FaceField& f) {
    const Grid2D& g = f.grid();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(g.nx()) * (g.ny() - 1));
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) out.push_back(f.y(i, j));
    return out;
}

void unpack_x(std::span<const double> packed, FaceField& f) {
    const Grid2D& g = f.grid();
    std::size_t k = 0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) f.x(i, j) = packed[k++];
}

void unpack_y(std::span<const double> packed, FaceField& f) {
    const Grid2D& g = f.grid();
    std::size_t k = 0;
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) f.y(i, j) = packed[k++];
}

} // namespace

FaceField velocity_laplacian(const MacVelocity& u) {
    const Grid2D& g = u.grid();
    FaceField out(g);
    const std::vector<double> ux = pack_x(u);
    const std::vector<double> uy = pack_y(u);
    std::vector<double> lx(ux.size()), ly(uy.size());
    apply_block_laplacian(ux, lx, g.nx() - 1, g.ny(), g.hx(), g.hy(), AxisBoundary::dirichlet_nodes,
                          AxisBoundary::dirichlet_walls);
    apply_block_laplacian(uy, ly, g.nx(), g.ny() - 1, g.hx(), g.hy(), AxisBoundary::dirichlet_walls,
                          AxisBoundary::dirichlet_nodes);
    unpack_x(lx, out);
    unpack_y(ly, out);
    return out;
}

ScalarField pressure_poisson_solve(const ScalarField& rhs, PoissonWorkspace& ws, double tol) {
    const Grid2D& g = rhs.grid();
    if (!(ws.grid() == g)) throw GridMismatch("pressure solve: workspace grid differs");
    const std::size_t n = g.cells();
    // Neumann compatibility: solve against the mean-free part of rhs.
    double sum = 0.0;
    for (double v : rhs.values()) sum += v;
    const double mean = sum / static_cast<double>(n);
    std::vector<double> b(n);
    for (std::size_t k = 0; k < n; ++k) b[k] = -(rhs[k] - mean);

    // SPD-on-complement system (-L) p = -rhs_c.
    auto apply = [&](std::span<const double> in, std::span<double> out) {
        apply_block_laplacian(in, out, g.nx(), g.ny(), g.hx(), g.hy(), AxisBoundary::neumann_cells,
                              AxisBoundary::neumann_cells);
        for (double& v : out) v = -v;
    };
    auto precondition = [&](std::span<const double> in, std::span<double> out) {
        ws.cells().solve(in, out, 0.0, 1.0);
    };
    ScalarField p(g, FieldKind::pressure);
    const double abs_tol = tol * (1.0 + rhs.max_abs());
    const SolveStats stats = pcg(apply, precondition, b, p.values(), abs_tol, kMaxSolverIterations, true,
                                 "pressure Poisson solve");
    ws.last_residual = stats.residual;
    ws.last_iterations = stats.iterations;
    return p;
}

ScalarField implicit_diffusion_solve(const ScalarField& b, double shift, double dt, PoissonWorkspace& ws,
                                     double tol) {
    const Grid2D& g = b.grid();
    if (!(ws.grid() == g)) throw GridMismatch("implicit solve: workspace grid differs");
    const double diag = 1.0 + shift;
    auto apply = [&](std::span<const double> in, std::span<double> out) {
        apply_block_laplacian(in, out, g.nx(), g.ny(), g.hx(), g.hy(), AxisBoundary::neumann_cells,
                              AxisBoundary::neumann_cells);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = diag * in[k] - dt * out[k];
    };
    auto precondition = [&](std::span<const double> in, std::span<double> out) {
        ws.cells().solve(in, out, diag, dt);
    };
    ScalarField x(g, b.kind());
    ws.last_implicit = pcg(apply, precondition, b.values(), x.values(), tol * (1.0 + b.max_abs()),
                           kMaxSolverIterations, false, "implicit diffusion solve");
    return x;
}

MacVelocity implicit_viscous_solve(const MacVelocity& b, double dt, PoissonWorkspace& ws, double tol) {
    const Grid2D& g = b.grid();
    if (!(ws.grid() == g)) throw GridMismatch("viscous solve: workspace grid differs");
    MacVelocity out(g);
    const double abs_tol = tol * (1.0 + b.max_abs());

    auto solve_component = [&](std::vector<double> rhs, SpectralSolver& spectral, int bnx, int bny,
                               AxisBoundary bx, AxisBoundary by) {
        auto apply = [&](std::span<const double> in, std::span<double> res) {
            apply_block_laplacian(in, res, bnx, bny, g.hx(), g.hy(), bx, by);
            for (std::size_t k = 0; k < res.size(); ++k) res[k] = in[k] - dt * res[k];
        };
        auto precondition = [&](std::span<const double> in, std::span<double> res) {
            spectral.solve(in, res, 1.0, dt);
        };
        std::vector<double> x(rhs.size());
        const SolveStats stats =
            pcg(apply, precondition, rhs, x, abs_tol, kMaxSolverIterations, false, "viscous solve");
        ws.last_viscous.iterations = std::max(ws.last_viscous.iterations, stats.iterations);
        ws.last_viscous.residual = std::max(ws.last_viscous.residual, stats.residual);
        return x;
    };

    ws.last_viscous = {};
    const std::vector<double> ux = solve_component(pack_x(b), ws.x_faces(), g.nx() - 1, g.ny(),
                                                   AxisBoundary::dirichlet_nodes, AxisBoundary::dirichlet_walls);
    const std::vector<double> uy = solve_component(pack_y(b), ws.y_faces(), g.nx(), g.ny() - 1,
                                                   AxisBoundary::dirichlet_walls, AxisBoundary::dirichlet_nodes);
    unpack_x(ux, out);
    unpack_y(uy, out);
    return out;
}

Projection project(const MacVelocity& u_star, double dt, PoissonWorkspace& ws, double poisson_tol) {
    if (!(dt > 0.0)) throw InvalidArgument("project needs dt > 0");
    if (!u_star.boundary_is_zero()) throw InvalidArgument("project: u* has nonzero boundary faces");
    ScalarField rhs = divergence_mac(u_star);
    for (double& v : rhs.values()) v /= dt;

    // div u = dt * residual, so tighten the solve until that meets the
    // projection bound poisson_tol (1 + max face speed).
    const double speed = u_star.max_abs();
    const double tol = poisson_tol * std::min(1.0, (1.0 + speed) / (dt * (1.0 + rhs.max_abs())));
    ScalarField p = pressure_poisson_solve(rhs, ws, tol);

    const FaceFluxField grad = gradient_faces(p);
    MacVelocity u = u_star;
    for (std::size_t k = 0; k < u.xs().size(); ++k) u.xs()[k] -= dt * grad.xs()[k];
    for (std::size_t k = 0; k < u.ys().size(); ++k) u.ys()[k] -= dt * grad.ys()[k];
    return {std::move(u), std::move(p)};
}

Projection fluid_step(const SimState& state, double dt, const SimParams& params, PoissonWorkspace& ws) {
    const MacVelocity& u = state.u;
    const Grid2D& g = u.grid();
    if (params.kappa != 0.0) {
        const double courant = dt * u.max_abs() / g.min_spacing();
        if (courant > 1.0) {
            std::ostringstream msg;
            msg << "advective Courant number " << courant << " > 1 at dt = " << dt;
            throw CflViolation(msg.str());
        }
    }

    const FaceField conv = convective_term(u, params);
    MacVelocity rhs = u;
    for (std::size_t k = 0; k < rhs.xs().size(); ++k) rhs.xs()[k] -= dt * conv.xs()[k];
    for (std::size_t k = 0; k < rhs.ys().size(); ++k) rhs.ys()[k] -= dt * conv.ys()[k];

    MacVelocity u_star = implicit_viscous_solve(rhs, dt, ws, params.implicit_tol);

    // Buoyancy enters after the viscous solve so a gradient force stays an
    // exact discrete gradient and is removed entirely by the projection.
    const FaceField force = buoyancy_force(state.n, state.m, params);
    for (std::size_t k = 0; k < u_star.xs().size(); ++k) u_star.xs()[k] += dt * force.xs()[k];
    for (std::size_t k = 0; k < u_star.ys().size(); ++k) u_star.ys()[k] += dt * force.ys()[k];

    return project(u_star, dt, ws, params.poisson_tol);
}

} // namespace cksf

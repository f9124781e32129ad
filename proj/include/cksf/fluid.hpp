#pragma once

#include "cksf/grid.hpp"
#include "cksf/krylov.hpp"
#include "cksf/spectral.hpp"

namespace cksf {

/**
 * Solver scratch owned by one simulation: spectral preconditioners for the
 * cell-centered Neumann operator (pressure and scalar diffusion) and for the
 * two staggered velocity components, plus statistics of the most recent solves.
 */
class PoissonWorkspace {
public:
    explicit PoissonWorkspace(const Grid2D& grid);

    const Grid2D& grid() const noexcept { return grid_; }

    SpectralSolver& cells() noexcept { return cells_; }
    SpectralSolver& x_faces() noexcept { return x_faces_; }
    SpectralSolver& y_faces() noexcept { return y_faces_; }

    double last_residual = 0.0;
    int last_iterations = 0;
    SolveStats last_viscous;
    SolveStats last_implicit;

private:
    Grid2D grid_;
    SpectralSolver cells_;
    SpectralSolver x_faces_;
    SpectralSolver y_faces_;
};

inline constexpr int kMaxSolverIterations = 500;

/// (n + m) interpolated to faces times the constant potential gradient.
FaceField buoyancy_force(const ScalarField& n, const ScalarField& m, const SimParams& params);

/// kappa (u . grad) u, first-order upwind on each staggered component.
/// Exactly zero when kappa == 0.
FaceField convective_term(const MacVelocity& u, const SimParams& params);

/// Vector Laplacian of the MAC velocity with no-slip walls. Boundary faces of
/// the result are 0.
FaceField velocity_laplacian(const MacVelocity& u);

/// Solves laplacian_neumann(p) = rhs - mean(rhs) for mean-zero p with
/// ||L p - rhs_corrected||_inf <= tol (1 + ||rhs||_inf).
ScalarField pressure_poisson_solve(const ScalarField& rhs, PoissonWorkspace& ws, double tol);

/// Solves ((1 + shift) I - dt L) x = b on cells with Neumann boundaries,
/// residual <= tol (1 + ||b||_inf).
ScalarField implicit_diffusion_solve(const ScalarField& b, double shift, double dt,
                                     PoissonWorkspace& ws, double tol);

/// Backward-Euler viscous solve (I - dt Lv) u = b on interior faces.
MacVelocity implicit_viscous_solve(const MacVelocity& b, double dt, PoissonWorkspace& ws, double tol);

struct Projection {
    MacVelocity u;
    ScalarField p;
};

/// Chorin projection: p solves L p = div(u*) / dt and u = u* - dt grad p.
Projection project(const MacVelocity& u_star, double dt, PoissonWorkspace& ws, double poisson_tol);

/// One velocity update: implicit viscosity, explicit convection and buoyancy,
/// then projection. Throws CflViolation when kappa != 0 and the advective
/// Courant number exceeds 1.
Projection fluid_step(const SimState& state, double dt, const SimParams& params, PoissonWorkspace& ws);

} // namespace cksf

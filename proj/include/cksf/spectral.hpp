#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cksf {

/// Boundary treatment of one axis of a separable 5-point operator.
enum class AxisBoundary {
    /// Cell unknowns, zero normal derivative by ghost reflection (DCT-II basis).
    neumann_cells,
    /// Node unknowns strictly inside two Dirichlet nodes held at 0 (DST-I basis).
    dirichlet_nodes,
    /// Cell unknowns with walls at half a cell, antisymmetric ghost (DST-II basis).
    dirichlet_walls,
};

/**
 * Exact solver for (shift I - scale L) x = b where L is the 5-point Laplacian
 * on an n0 x n1 block (x fastest) with the given axis boundaries. L is
 * diagonalized by real trigonometric transforms. A zero eigenvalue of the
 * shifted operator (pure Neumann, shift 0) drops that mode, returning the
 * mean-zero pseudo-inverse.
 *
 * Not copyable; one instance per simulation. Planning uses FFTW_ESTIMATE and
 * private aligned buffers so repeated solves are bitwise reproducible.
 */
class SpectralSolver {
public:
    SpectralSolver(int nx, int ny, double hx, double hy, AxisBoundary bx, AxisBoundary by);
    ~SpectralSolver();
    SpectralSolver(SpectralSolver&&) noexcept;
    SpectralSolver& operator=(SpectralSolver&&) noexcept;
    SpectralSolver(const SpectralSolver&) = delete;
    SpectralSolver& operator=(const SpectralSolver&) = delete;

    int nx() const noexcept;
    int ny() const noexcept;
    std::size_t size() const noexcept;

    void solve(std::span<const double> rhs, std::span<double> x, double shift, double scale);

    /// Positive eigenvalues of -L along one axis, in transform order.
    static std::vector<double> axis_eigenvalues(int n, double h, AxisBoundary boundary);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// out = L in for an n0 x n1 block (x fastest) with the given axis
/// boundaries; the matrix-free companion of SpectralSolver.
void apply_block_laplacian(std::span<const double> in, std::span<double> out, int nx, int ny, double hx,
                           double hy, AxisBoundary bx, AxisBoundary by);

} // namespace cksf

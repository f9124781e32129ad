#include "cksf/spectral.hpp"

#include "cksf/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace cksf {

namespace {

// The FFTW planner is not thread-safe; sweep cells build solvers concurrently.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct AxisTransform {
    fftw_r2r_kind forward;
    fftw_r2r_kind backward;
    double normalization;
};

AxisTransform axis_transform(int n, AxisBoundary boundary) {
    switch (boundary) {
    case AxisBoundary::neumann_cells: return {FFTW_REDFT10, FFTW_REDFT01, 2.0 * n};
    case AxisBoundary::dirichlet_nodes: return {FFTW_RODFT00, FFTW_RODFT00, 2.0 * (n + 1)};
    case AxisBoundary::dirichlet_walls: return {FFTW_RODFT10, FFTW_RODFT01, 2.0 * n};
    }
    throw InvalidArgument("unknown axis boundary");
}

} // namespace

struct SpectralSolver::Impl {
    int nx = 0;
    int ny = 0;
    double* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> eig_x;
    std::vector<double> eig_y;
    double normalization = 1.0;

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buffer) fftw_free(buffer);
    }
};

std::vector<double> SpectralSolver::axis_eigenvalues(int n, double h, AxisBoundary boundary) {
    std::vector<double> eig(static_cast<std::size_t>(n));
    const double scale = 2.0 / (h * h);
    const double pi = std::numbers::pi;
    for (int k = 0; k < n; ++k) {
        double theta = 0.0;
        switch (boundary) {
        case AxisBoundary::neumann_cells: theta = pi * k / n; break;
        case AxisBoundary::dirichlet_nodes: theta = pi * (k + 1) / (n + 1); break;
        case AxisBoundary::dirichlet_walls: theta = pi * (k + 1) / n; break;
        }
        eig[static_cast<std::size_t>(k)] = scale * (1.0 - std::cos(theta));
    }
    return eig;
}

SpectralSolver::SpectralSolver(int nx, int ny, double hx, double hy, AxisBoundary bx, AxisBoundary by)
    : impl_(std::make_unique<Impl>()) {
    if (nx < 1 || ny < 1) throw InvalidArgument("spectral solver needs a nonempty block");
    impl_->nx = nx;
    impl_->ny = ny;
    impl_->eig_x = axis_eigenvalues(nx, hx, bx);
    impl_->eig_y = axis_eigenvalues(ny, hy, by);
    const AxisTransform tx = axis_transform(nx, bx);
    const AxisTransform ty = axis_transform(ny, by);
    impl_->normalization = tx.normalization * ty.normalization;

    std::lock_guard lock(planner_mutex());
    impl_->buffer = fftw_alloc_real(static_cast<std::size_t>(nx) * ny);
    if (!impl_->buffer) throw Error("fftw_alloc_real failed");
    // Row-major [ny][nx]: the first transform dimension is y.
    impl_->forward = fftw_plan_r2r_2d(ny, nx, impl_->buffer, impl_->buffer, ty.forward, tx.forward, FFTW_ESTIMATE);
    impl_->backward = fftw_plan_r2r_2d(ny, nx, impl_->buffer, impl_->buffer, ty.backward, tx.backward, FFTW_ESTIMATE);
    if (!impl_->forward || !impl_->backward) throw Error("FFTW planning failed");
}

SpectralSolver::~SpectralSolver() = default;
SpectralSolver::SpectralSolver(SpectralSolver&&) noexcept = default;
SpectralSolver& SpectralSolver::operator=(SpectralSolver&&) noexcept = default;

int SpectralSolver::nx() const noexcept { return impl_->nx; }
int SpectralSolver::ny() const noexcept { return impl_->ny; }
std::size_t SpectralSolver::size() const noexcept { return static_cast<std::size_t>(impl_->nx) * impl_->ny; }

void SpectralSolver::solve(std::span<const double> rhs, std::span<double> x, double shift, double scale) {
    const std::size_t n = size();
    if (rhs.size() != n || x.size() != n) throw GridMismatch("spectral solve: vector length mismatch");
    double* buf = impl_->buffer;
    std::copy(rhs.begin(), rhs.end(), buf);
    fftw_execute(impl_->forward);
    const int nx = impl_->nx;
    for (int j = 0; j < impl_->ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double denom = (shift + scale * (impl_->eig_x[i] + impl_->eig_y[j])) * impl_->normalization;
            double& coeff = buf[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j];
            coeff = denom == 0.0 ? 0.0 : coeff / denom;
        }
    }
    fftw_execute(impl_->backward);
    std::copy(buf, buf + n, x.begin());
}

namespace {

// Value standing in for a neighbour outside the block.
inline double outside(double centre, AxisBoundary boundary) {
    switch (boundary) {
    case AxisBoundary::neumann_cells: return centre;
    case AxisBoundary::dirichlet_nodes: return 0.0;
    case AxisBoundary::dirichlet_walls: return -centre;
    }
    return 0.0;
}

} // namespace

void apply_block_laplacian(std::span<const double> in, std::span<double> out, int nx, int ny, double hx,
                           double hy, AxisBoundary bx, AxisBoundary by) {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    if (in.size() != n || out.size() != n) throw GridMismatch("block laplacian: vector length mismatch");
    const double cx = 1.0 / (hx * hx);
    const double cy = 1.0 / (hy * hy);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j;
            const double u = in[k];
            const double west = i > 0 ? in[k - 1] : outside(u, bx);
            const double east = i < nx - 1 ? in[k + 1] : outside(u, bx);
            const double south = j > 0 ? in[k - nx] : outside(u, by);
            const double north = j < ny - 1 ? in[k + nx] : outside(u, by);
            out[k] = cx * ((west - u) + (east - u)) + cy * ((south - u) + (north - u));
        }
    }
}

} // namespace cksf

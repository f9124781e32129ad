#include "cksf/operators.hpp"

#include "cksf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cksf {

double sensitivity(double n_value, const SimParams& params) {
    if (n_value < 0.0 || std::isnan(n_value)) {
        throw NegativeDensity("sensitivity evaluated at n = " + std::to_string(n_value));
    }
    return params.c_s * std::pow(1.0 + n_value, -params.alpha);
}

FaceFluxField gradient_faces(const ScalarField& f) {
    const Grid2D& g = f.grid();
    FaceFluxField out(g);
    const double inv_hx = 1.0 / g.hx();
    const double inv_hy = 1.0 / g.hy();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) out.x(i, j) = (f(i, j) - f(i - 1, j)) * inv_hx;
    }
    for (int j = 1; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) out.y(i, j) = (f(i, j) - f(i, j - 1)) * inv_hy;
    }
    return out;
}

ScalarField divergence_faces(const FaceField& flux) {
    const Grid2D& g = flux.grid();
    ScalarField out(g);
    const double inv_hx = 1.0 / g.hx();
    const double inv_hy = 1.0 / g.hy();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            out(i, j) = (flux.x(i + 1, j) - flux.x(i, j)) * inv_hx + (flux.y(i, j + 1) - flux.y(i, j)) * inv_hy;
        }
    }
    return out;
}

ScalarField laplacian_neumann(const ScalarField& f) {
    const Grid2D& g = f.grid();
    ScalarField out(g);
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = 1.0 / (g.hy() * g.hy());
    const int nx = g.nx();
    const int ny = g.ny();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double fc = f(i, j);
            double s = 0.0;
            // Missing neighbours are ghost reflections: their face term vanishes.
            if (i > 0) s += cx * (f(i - 1, j) - fc);
            if (i < nx - 1) s += cx * (f(i + 1, j) - fc);
            if (j > 0) s += cy * (f(i, j - 1) - fc);
            if (j < ny - 1) s += cy * (f(i, j + 1) - fc);
            out(i, j) = s;
        }
    }
    return out;
}

namespace {

// Donor-cell flux of f carried by the face velocity v between `lower` and `upper`.
inline double donor_flux(double v, double lower, double upper) {
    if (v > 0.0) return v * lower;
    if (v < 0.0) return v * upper;
    return 0.0;
}

} // namespace

ScalarField advect_scalar(const ScalarField& f, const MacVelocity& u) {
    const Grid2D& g = f.grid();
    if (!(u.grid() == g)) throw GridMismatch("advect_scalar: velocity and field grids differ");
    FaceFluxField flux(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) flux.x(i, j) = donor_flux(u.x(i, j), f(i - 1, j), f(i, j));
    }
    for (int j = 1; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) flux.y(i, j) = donor_flux(u.y(i, j), f(i, j - 1), f(i, j));
    }
    return divergence_faces(flux);
}

namespace {

void require_nonnegative_density(const ScalarField& n) {
    for (double v : n.values()) {
        if (v < 0.0 || std::isnan(v)) throw NegativeDensity("chemotaxis with negative density " + std::to_string(v));
    }
}

// n_d S(n_d) g with the donor chosen by the sign of the drift S g (S > 0).
inline double chemotactic_face_flux(double g, double n_lower, double n_upper, const SimParams& params) {
    if (g > 0.0) return n_lower * sensitivity(n_lower, params) * g;
    if (g < 0.0) return n_upper * sensitivity(n_upper, params) * g;
    return 0.0;
}

inline double drift_speed(double g, double n_lower, double n_upper, const SimParams& params) {
    if (g > 0.0) return sensitivity(n_lower, params) * g;
    if (g < 0.0) return -sensitivity(n_upper, params) * g;
    return 0.0;
}

} // namespace

FaceFluxField chemotaxis_flux(const ScalarField& n, const ScalarField& c, const SimParams& params) {
    const Grid2D& g = n.grid();
    if (!(c.grid() == g)) throw GridMismatch("chemotaxis: n and c grids differ");
    require_nonnegative_density(n);
    FaceFluxField flux = gradient_faces(c);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) {
            flux.x(i, j) = chemotactic_face_flux(flux.x(i, j), n(i - 1, j), n(i, j), params);
        }
    }
    for (int j = 1; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            flux.y(i, j) = chemotactic_face_flux(flux.y(i, j), n(i, j - 1), n(i, j), params);
        }
    }
    return flux;
}

ScalarField chemotaxis_divergence(const ScalarField& n, const ScalarField& c, const SimParams& params) {
    return divergence_faces(chemotaxis_flux(n, c, params));
}

double max_chemotactic_drift(const ScalarField& n, const ScalarField& c, const SimParams& params) {
    const Grid2D& g = n.grid();
    require_nonnegative_density(n);
    const FaceFluxField grad = gradient_faces(c);
    double vmax = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) vmax = std::max(vmax, drift_speed(grad.x(i, j), n(i - 1, j), n(i, j), params));
    }
    for (int j = 1; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) vmax = std::max(vmax, drift_speed(grad.y(i, j), n(i, j - 1), n(i, j), params));
    }
    return vmax;
}

double max_outflow_rate(const ScalarField& n, const ScalarField& c, const MacVelocity& u, const SimParams& params) {
    const Grid2D& g = n.grid();
    require_nonnegative_density(n);
    const FaceFluxField grad = gradient_faces(c);
    ScalarField rate(g);
    const double inv_hx = 1.0 / g.hx();
    const double inv_hy = 1.0 / g.hy();
    // Positive face speed moves mass from the lower to the upper cell.
    auto credit = [&](double speed, std::size_t lower, std::size_t upper, double inv_h) {
        if (speed > 0.0) rate[lower] += speed * inv_h;
        if (speed < 0.0) rate[upper] -= speed * inv_h;
    };
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) {
            const std::size_t lo = g.cell(i - 1, j), hi = g.cell(i, j);
            credit(u.x(i, j), lo, hi, inv_hx);
            const double gx = grad.x(i, j);
            const double s = gx > 0.0 ? sensitivity(n[lo], params) : sensitivity(n[hi], params);
            credit(s * gx, lo, hi, inv_hx);
        }
    }
    for (int j = 1; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const std::size_t lo = g.cell(i, j - 1), hi = g.cell(i, j);
            credit(u.y(i, j), lo, hi, inv_hy);
            const double gy = grad.y(i, j);
            const double s = gy > 0.0 ? sensitivity(n[lo], params) : sensitivity(n[hi], params);
            credit(s * gy, lo, hi, inv_hy);
        }
    }
    return rate.max();
}

} // namespace cksf

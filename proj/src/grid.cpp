#include "cksf/grid.hpp"

#include "cksf/errors.hpp"
#include "cksf/operators.hpp"
#include "cksf/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace cksf {

Grid2D::Grid2D(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), hx_(lx / nx), hy_(ly / ny) {
    if (nx < 4 || ny < 4) {
        throw InvalidArgument("grid needs at least 4 cells per axis, got " + std::to_string(nx) + "x" +
                              std::to_string(ny));
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw InvalidArgument("grid side lengths must be positive and finite");
    }
}

ScalarField::ScalarField(const Grid2D& grid, FieldKind kind, double fill)
    : grid_(grid), kind_(kind), values_(grid.cells(), fill) {}

ScalarField::ScalarField(const Grid2D& grid, std::vector<double> values, FieldKind kind)
    : grid_(grid), kind_(kind), values_(std::move(values)) {
    if (values_.size() != grid_.cells()) {
        throw GridMismatch("field has " + std::to_string(values_.size()) + " values, grid has " +
                           std::to_string(grid_.cells()) + " cells");
    }
}

double ScalarField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

FaceField::FaceField(const Grid2D& grid) : grid_(grid), xs_(grid.x_faces(), 0.0), ys_(grid.y_faces(), 0.0) {}

double FaceField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : xs_) m = std::max(m, std::abs(v));
    for (double v : ys_) m = std::max(m, std::abs(v));
    return m;
}

bool FaceField::boundary_is_zero() const noexcept {
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    for (int j = 0; j < ny; ++j) {
        if (x(0, j) != 0.0 || x(nx, j) != 0.0) return false;
    }
    for (int i = 0; i < nx; ++i) {
        if (y(i, 0) != 0.0 || y(i, ny) != 0.0) return false;
    }
    return true;
}

void SimParams::validate() const {
    auto in_tol_range = [](double v) { return v > 0.0 && v < 1e-4; };
    if (!(c_s > 0.0)) throw InvalidArgument("c_s must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be >= 0");
    if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw InvalidArgument("dt must be > 0");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0) throw InvalidArgument("cfl_safety must be in (0, 1]");
    if (!in_tol_range(poisson_tol)) throw InvalidArgument("poisson_tol must be in (0, 1e-4)");
    if (!in_tol_range(implicit_tol)) throw InvalidArgument("implicit_tol must be in (0, 1e-4)");
    if (!std::isfinite(alpha) || !std::isfinite(kappa)) throw InvalidArgument("alpha and kappa must be finite");
    if (!std::isfinite(phi_gradient[0]) || !std::isfinite(phi_gradient[1])) {
        throw InvalidArgument("phi gradient must be finite");
    }
}

SimState::SimState(const Grid2D& grid)
    : n(grid, FieldKind::density),
      c(grid, FieldKind::concentration),
      m(grid, FieldKind::density),
      u(grid),
      p(grid, FieldKind::pressure) {}

namespace {

ScalarField retag(const ScalarField& f, FieldKind kind) {
    return ScalarField(f.grid(), std::vector<double>(f.values().begin(), f.values().end()), kind);
}

void require_nonnegative(const ScalarField& f, const char* name) {
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] < 0.0 || std::isnan(f[k])) {
            std::ostringstream msg;
            msg << "CustomFieldNegative: initial " << name << " has negative entry " << f[k] << " at cell "
                << k % f.grid().nx() << "," << k / f.grid().nx();
            throw CustomFieldNegative(msg.str());
        }
    }
}

ScalarField floored(const ScalarField& f, FieldKind kind) {
    ScalarField out = retag(f, kind);
    for (double& v : out.values()) v = std::max(v, kPresetFloor);
    return out;
}

ScalarField field_from_snapshot(const Grid2D& grid, const std::filesystem::path& path) {
    Snapshot snap = read_snapshot(path);
    if (snap.header.nx != grid.nx() || snap.header.ny != grid.ny()) {
        throw GridMismatch(path.string() + " is " + std::to_string(snap.header.nx) + "x" +
                           std::to_string(snap.header.ny) + ", grid is " + std::to_string(grid.nx()) + "x" +
                           std::to_string(grid.ny()));
    }
    return ScalarField(grid, std::move(snap.values));
}

SimState two_blobs(const Grid2D& grid, const TwoBlobsPreset& preset) {
    SimState state(grid);
    const double sigma = preset.sigma_fraction * grid.lx();
    const double x1 = 0.35 * grid.lx(), y1 = 0.6 * grid.ly();
    const double x2 = 0.65 * grid.lx(), y2 = 0.6 * grid.ly();
    const double two_sigma_sq = 2.0 * sigma * sigma;
    std::mt19937_64 rng(preset.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const double x = grid.x_center(i);
            const double y = grid.y_center(j);
            const double d1 = (x - x1) * (x - x1) + (y - y1) * (y - y1);
            const double d2 = (x - x2) * (x - x2) + (y - y2) * (y - y2);
            double n0 = preset.amplitude * std::exp(-d1 / two_sigma_sq);
            if (preset.perturbation > 0.0) n0 *= 1.0 + preset.perturbation * unit(rng);
            state.n(i, j) = n0;
            state.m(i, j) = preset.amplitude * std::exp(-d2 / two_sigma_sq) + kPresetFloor;
            state.c(i, j) = kPresetFloor;
        }
    }
    return state;
}

} // namespace

SimState make_state_from_fields(const ScalarField& n0, const ScalarField& c0, const ScalarField& m0) {
    if (!(n0.grid() == c0.grid()) || !(n0.grid() == m0.grid())) {
        throw GridMismatch("initial n, c, m are on different grids");
    }
    require_nonnegative(n0, "n");
    require_nonnegative(c0, "c");
    require_nonnegative(m0, "m");
    SimState state(n0.grid());
    state.n = retag(n0, FieldKind::density);
    state.c = floored(c0, FieldKind::concentration);
    state.m = floored(m0, FieldKind::density);
    return state;
}

SimState make_initial_state(const Grid2D& grid, const InitialPreset& preset, const SimParams& params) {
    params.validate();
    if (const auto* blobs = std::get_if<TwoBlobsPreset>(&preset)) {
        if (!(blobs->amplitude >= 0.0) || !(blobs->sigma_fraction > 0.0)) {
            throw InvalidArgument("two_blobs needs amplitude >= 0 and sigma > 0");
        }
        if (!(blobs->perturbation >= 0.0 && blobs->perturbation < 1.0)) {
            throw InvalidArgument("perturbation must be in [0, 1)");
        }
        return two_blobs(grid, *blobs);
    }
    if (const auto* uniform = std::get_if<UniformPreset>(&preset)) {
        return make_state_from_fields(ScalarField(grid, FieldKind::density, uniform->n),
                                      ScalarField(grid, FieldKind::concentration, uniform->c),
                                      ScalarField(grid, FieldKind::density, uniform->m));
    }
    const auto& custom = std::get<CustomPreset>(preset);
    return make_state_from_fields(field_from_snapshot(grid, custom.n_file),
                                  field_from_snapshot(grid, custom.c_file),
                                  field_from_snapshot(grid, custom.m_file));
}

double integrate_cellwise(const ScalarField& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return f.grid().cell_area() * sum;
}

double cell_dot(const ScalarField& f, const ScalarField& g) {
    if (!(f.grid() == g.grid())) throw GridMismatch("cell_dot on different grids");
    double sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) sum += f[k] * g[k];
    return sum;
}

std::vector<std::string> check_state(const SimState& state, double poisson_tol) {
    std::vector<std::string> problems;
    const Grid2D& grid = state.grid();
    if (!(state.c.grid() == grid) || !(state.m.grid() == grid) || !(state.p.grid() == grid) ||
        !(state.u.grid() == grid)) {
        problems.emplace_back("fields live on different grids");
        return problems;
    }
    auto check_nonneg = [&](const ScalarField& f, const char* name) {
        for (double v : f.values()) {
            if (!(v >= 0.0)) {
                problems.push_back(std::string(name) + " has a negative or NaN value");
                return;
            }
        }
    };
    check_nonneg(state.n, "n");
    check_nonneg(state.c, "c");
    check_nonneg(state.m, "m");

    if (!state.u.boundary_is_zero()) problems.emplace_back("velocity boundary faces are not zero");

    const double speed = state.u.max_abs();
    const double div = divergence_mac(state.u).max_abs();
    if (!(div <= 10.0 * poisson_tol * (1.0 + speed))) {
        std::ostringstream msg;
        msg << "max |div u| = " << div << " exceeds " << 10.0 * poisson_tol * (1.0 + speed);
        problems.push_back(msg.str());
    }

    double sum = 0.0;
    for (double v : state.p.values()) sum += v;
    const double mean = sum / static_cast<double>(state.p.size());
    if (!(std::abs(mean) <= 1e-12 * state.p.max_abs())) {
        std::ostringstream msg;
        msg << "pressure mean " << mean << " is not zero";
        problems.push_back(msg.str());
    }
    if (!(state.t >= 0.0)) problems.emplace_back("negative time");
    return problems;
}

} // namespace cksf

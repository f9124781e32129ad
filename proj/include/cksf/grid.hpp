#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cksf {

/// Positive floor applied to c and m by the built-in presets.
inline constexpr double kPresetFloor = 1e-8;

/**
 * Uniform cell-centered grid on the rectangle [0, lx] x [0, ly].
 *
 * Cell (i, j) has center ((i + 1/2) hx, (j + 1/2) hy). Every cell array is
 * stored row-major with x fastest: index = i + nx * j.
 */
class Grid2D {
public:
    Grid2D(int nx, int ny, double lx, double ly);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double lx() const noexcept { return lx_; }
    double ly() const noexcept { return ly_; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }
    double cell_area() const noexcept { return hx_ * hy_; }
    double min_spacing() const noexcept { return hx_ < hy_ ? hx_ : hy_; }

    std::size_t cells() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t x_faces() const noexcept { return static_cast<std::size_t>(nx_ + 1) * ny_; }
    std::size_t y_faces() const noexcept { return static_cast<std::size_t>(nx_) * (ny_ + 1); }

    std::size_t cell(int i, int j) const noexcept { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_) * j; }
    std::size_t x_face(int i, int j) const noexcept { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_ + 1) * j; }
    std::size_t y_face(int i, int j) const noexcept { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_) * j; }

    double x_center(int i) const noexcept { return (i + 0.5) * hx_; }
    double y_center(int j) const noexcept { return (j + 0.5) * hy_; }

    bool operator==(const Grid2D& other) const noexcept {
        return nx_ == other.nx_ && ny_ == other.ny_ && lx_ == other.lx_ && ly_ == other.ly_;
    }

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
    double hx_;
    double hy_;
};

enum class FieldKind { generic, density, concentration, pressure };

/// Cell-centered scalar field. Density and concentration fields are expected
/// to stay nonnegative; the stepper checks this after every step.
class ScalarField {
public:
    explicit ScalarField(const Grid2D& grid, FieldKind kind = FieldKind::generic, double fill = 0.0);
    ScalarField(const Grid2D& grid, std::vector<double> values, FieldKind kind = FieldKind::generic);

    const Grid2D& grid() const noexcept { return grid_; }
    FieldKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator()(int i, int j) noexcept { return values_[grid_.cell(i, j)]; }
    double operator()(int i, int j) const noexcept { return values_[grid_.cell(i, j)]; }
    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double min() const noexcept;
    double max() const noexcept;
    double max_abs() const noexcept;
    bool nonnegative() const noexcept { return min() >= 0.0; }

private:
    Grid2D grid_;
    FieldKind kind_;
    std::vector<double> values_;
};

/**
 * Face-centered vector data on the MAC grid.
 *
 * The x component lives on vertical faces, (nx+1) x ny, face (i, j) sitting
 * between cells (i-1, j) and (i, j). The y component lives on horizontal faces,
 * nx x (ny+1), face (i, j) between cells (i, j-1) and (i, j). Indices 0 and
 * nx (resp. ny) are the domain boundary.
 */
class FaceField {
public:
    explicit FaceField(const Grid2D& grid);

    const Grid2D& grid() const noexcept { return grid_; }

    double& x(int i, int j) noexcept { return xs_[grid_.x_face(i, j)]; }
    double x(int i, int j) const noexcept { return xs_[grid_.x_face(i, j)]; }
    double& y(int i, int j) noexcept { return ys_[grid_.y_face(i, j)]; }
    double y(int i, int j) const noexcept { return ys_[grid_.y_face(i, j)]; }

    std::span<double> xs() noexcept { return xs_; }
    std::span<const double> xs() const noexcept { return xs_; }
    std::span<double> ys() noexcept { return ys_; }
    std::span<const double> ys() const noexcept { return ys_; }

    /// Largest |value| over all faces.
    double max_abs() const noexcept;
    /// True when every boundary face is exactly 0.
    bool boundary_is_zero() const noexcept;

private:
    Grid2D grid_;
    std::vector<double> xs_;
    std::vector<double> ys_;
};

using MacVelocity = FaceField;
using FaceFluxField = FaceField;

enum class DtPolicy { fixed, adaptive };

struct SimParams {
    double alpha = -0.4;
    double kappa = 1.0;
    double c_s = 1.0;
    std::array<double, 2> phi_gradient{0.0, -1.0};
    DtPolicy dt_policy = DtPolicy::adaptive;
    /// Fixed step for DtPolicy::fixed, upper bound for DtPolicy::adaptive.
    double dt_max = 1e-3;
    double cfl_safety = 0.4;
    double t_end = 2.0;
    double poisson_tol = 1e-10;
    double implicit_tol = 1e-10;

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;

    bool operator==(const SimParams&) const = default;
};

struct SimState {
    explicit SimState(const Grid2D& grid);

    const Grid2D& grid() const noexcept { return n.grid(); }

    double t = 0.0;
    ScalarField n;
    ScalarField c;
    ScalarField m;
    MacVelocity u;
    ScalarField p;
    long step_index = 0;
    /// Mass added by clamping round-off negatives to zero, accumulated over the run.
    double clamp_total = 0.0;
};

struct TwoBlobsPreset {
    double amplitude = 5.0;
    /// Blob width as a fraction of lx.
    double sigma_fraction = 0.08;
    /// Relative amplitude of a seeded multiplicative perturbation of n0, in [0, 1).
    double perturbation = 0.0;
    std::uint64_t seed = 0;
};

struct UniformPreset {
    double n = 1.0;
    double c = 1.0;
    double m = 1.0;
};

/// Initial n, c, m read from CKSF1 snapshot files.
struct CustomPreset {
    std::filesystem::path n_file;
    std::filesystem::path c_file;
    std::filesystem::path m_file;
};

using InitialPreset = std::variant<TwoBlobsPreset, UniformPreset, CustomPreset>;

SimState make_initial_state(const Grid2D& grid, const InitialPreset& preset, const SimParams& params);

/// Builds a state from in-memory initial fields with the same validation and
/// flooring as the custom-file preset.
SimState make_state_from_fields(const ScalarField& n0, const ScalarField& c0, const ScalarField& m0);

/// Midpoint quadrature: hx * hy * sum of values, summed in storage order.
double integrate_cellwise(const ScalarField& f);

/// Cell-sum inner product sum_k f_k g_k (no area weight).
double cell_dot(const ScalarField& f, const ScalarField& g);

/// Returns the list of violated state invariants (empty when valid).
std::vector<std::string> check_state(const SimState& state, double poisson_tol);

} // namespace cksf

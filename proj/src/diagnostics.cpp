#include "cksf/diagnostics.hpp"

#include "cksf/operators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace cksf {

namespace {

double face_l2_sq(const FaceField& f) {
    double s = 0.0;
    for (double v : f.xs()) s += v * v;
    for (double v : f.ys()) s += v * v;
    return s * f.grid().cell_area();
}

// Integral of |grad c|^4 with the face gradients averaged to cell centers.
double grad_l4_pow4(const FaceField& grad) {
    const Grid2D& g = grad.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double gx = 0.5 * (grad.x(i, j) + grad.x(i + 1, j));
            const double gy = 0.5 * (grad.y(i, j) + grad.y(i, j + 1));
            const double sq = gx * gx + gy * gy;
            s += sq * sq;
        }
    }
    return s * g.cell_area();
}

// ||grad_h u||^2 matching the no-slip velocity Laplacian: interior face
// differences plus half-cell wall terms with gradient 2u/h.
double velocity_gradient_sq(const MacVelocity& u) {
    const Grid2D& g = u.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const double ihx2 = 1.0 / (g.hx() * g.hx());
    const double ihy2 = 1.0 / (g.hy() * g.hy());
    double s = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double d = u.x(i + 1, j) - u.x(i, j);
            s += d * d * ihx2;
        }
        for (int i = 1; i < nx; ++i) {
            if (j < ny - 1) {
                const double d = u.x(i, j + 1) - u.x(i, j);
                s += d * d * ihy2;
            }
        }
    }
    for (int i = 1; i < nx; ++i) {
        s += 2.0 * u.x(i, 0) * u.x(i, 0) * ihy2;
        s += 2.0 * u.x(i, ny - 1) * u.x(i, ny - 1) * ihy2;
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double d = u.y(i, j + 1) - u.y(i, j);
            s += d * d * ihy2;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx - 1; ++i) {
            const double d = u.y(i + 1, j) - u.y(i, j);
            s += d * d * ihx2;
        }
        s += 2.0 * u.y(0, j) * u.y(0, j) * ihx2;
        s += 2.0 * u.y(nx - 1, j) * u.y(nx - 1, j) * ihx2;
    }
    return s * g.cell_area();
}

} // namespace

DiagnosticsRecord compute_record(const SimState& state, const std::optional<DiagnosticsRecord>& prev) {
    const Grid2D& g = state.grid();
    const double area = g.cell_area();
    DiagnosticsRecord r;
    r.step = state.step_index;
    r.t = state.t;
    r.dt = prev ? state.t - prev->t : 0.0;

    r.mass_n = integrate_cellwise(state.n);
    r.mass_m = integrate_cellwise(state.m);
    r.mass_diff = r.mass_n - r.mass_m;
    r.sup_n = state.n.max_abs();
    r.sup_c = state.c.max_abs();
    r.sup_m = state.m.max_abs();
    r.sup_u = state.u.max_abs();

    double m_sq = 0.0, entropy = 0.0, log_sum = 0.0, nm = 0.0;
    for (std::size_t k = 0; k < state.n.size(); ++k) {
        const double n = state.n[k];
        const double m = state.m[k];
        const double log_n1 = std::log1p(n);
        m_sq += m * m;
        entropy += (n + 1.0) * log_n1;
        log_sum += log_n1;
        nm += n * m;
    }
    r.l2_m_sq = m_sq * area;
    r.entropy = entropy * area;

    const FaceField grad_c = gradient_faces(state.c);
    r.grad_c_l2 = face_l2_sq(grad_c);
    r.grad_c_l4 = grad_l4_pow4(grad_c);
    r.grad_u_l2_sq = velocity_gradient_sq(state.u);
    r.lyapunov = log_sum * area + face_l2_sq(state.u) + r.grad_c_l2;

    const double grad_m_sq = face_l2_sq(gradient_faces(state.m));
    r.cum_reaction = (prev ? prev->cum_reaction : 0.0) + r.dt * nm * area;
    r.cum_grad_m = (prev ? prev->cum_grad_m : 0.0) + 2.0 * r.dt * grad_m_sq;
    r.clamp_total = state.clamp_total;
    return r;
}

std::string Violation::describe() const {
    std::ostringstream out;
    out.precision(17);
    out << check << ": value " << value << " exceeds bound " << bound << " (slack " << slack << ")";
    return out.str();
}

std::vector<Violation> assert_invariants(const DiagnosticsRecord& curr, const DiagnosticsRecord& prev,
                                         const DiagnosticsRecord& initial, const InvariantTolerances& tol) {
    std::vector<Violation> out;
    auto require_le = [&](const char* check, double value, double bound, double slack) {
        if (!(value <= bound + slack)) out.push_back({check, value, bound, slack});
    };

    require_le("mass_n monotonicity", curr.mass_n, prev.mass_n, tol.mass_n_rel * initial.mass_n);
    require_le("mass_diff conservation", std::abs(curr.mass_diff - initial.mass_diff), 0.0,
               tol.mass_diff_rel * (initial.mass_n + initial.mass_m));
    require_le("sup_m maximum principle", curr.sup_m, initial.sup_m, tol.sup_abs);
    require_le("sup_c maximum principle", curr.sup_c, std::max(initial.sup_c, initial.sup_m), tol.sup_abs);
    require_le("cum_reaction bound", curr.cum_reaction, std::min(initial.mass_n, initial.mass_m),
               tol.cum_reaction_abs);
    require_le("l2_m dissipation", curr.l2_m_sq + curr.cum_grad_m, initial.l2_m_sq,
               tol.l2_m_rel * initial.l2_m_sq);
    require_le("clamp budget", curr.clamp_total, 0.0, tol.clamp_rel * initial.mass_n);
    return out;
}

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

std::string csv_header() {
    std::string out;
    for (std::size_t k = 0; k < kDiagnosticsColumns.size(); ++k) {
        if (k) out += ',';
        out += kDiagnosticsColumns[k];
    }
    return out;
}

std::string csv_row(const DiagnosticsRecord& r) {
    std::string out = std::to_string(r.step);
    for (double v : {r.t, r.dt, r.mass_n, r.mass_m, r.mass_diff, r.sup_n, r.sup_c, r.sup_m, r.sup_u, r.l2_m_sq,
                     r.grad_c_l2, r.grad_c_l4, r.entropy, r.grad_u_l2_sq, r.lyapunov, r.cum_reaction,
                     r.cum_grad_m, r.clamp_total}) {
        out += ',';
        out += format_double(v);
    }
    return out;
}

DiagnosticsWriter::DiagnosticsWriter(std::ostream& out) : out_(out) { out_ << csv_header() << '\n'; }

void DiagnosticsWriter::write(const DiagnosticsRecord& record) { out_ << csv_row(record) << '\n'; }

void DiagnosticsWriter::flush() { out_.flush(); }

} // namespace cksf

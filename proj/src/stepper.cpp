#include "cksf/stepper.hpp"

#include "cksf/errors.hpp"
#include "cksf/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cksf {

const char* to_string(DtConstraint constraint) {
    switch (constraint) {
    case DtConstraint::advective_cfl: return "advective_cfl";
    case DtConstraint::chemotactic_cfl: return "chemotactic_cfl";
    case DtConstraint::fixed: return "fixed";
    }
    return "unknown";
}

DtReport choose_dt(const SimState& state, const SimParams& params) {
    const Grid2D& g = state.grid();
    const FaceFluxField grad = gradient_faces(state.c);
    const ScalarField& n = state.n;
    const MacVelocity& u = state.u;

    double v_max = 0.0;
    double adv_at_max = 0.0;
    double drift_at_max = 0.0;
    auto consider = [&](double velocity, double gradient, double n_lower, double n_upper) {
        double drift = 0.0;
        if (gradient > 0.0) drift = sensitivity(n_lower, params) * gradient;
        if (gradient < 0.0) drift = -sensitivity(n_upper, params) * gradient;
        const double v = std::abs(velocity) + drift;
        if (v > v_max) {
            v_max = v;
            adv_at_max = std::abs(velocity);
            drift_at_max = drift;
        }
    };
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) consider(u.x(i, j), grad.x(i, j), n(i - 1, j), n(i, j));
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) consider(u.y(i, j), grad.y(i, j), n(i, j - 1), n(i, j));

    DtReport report;
    report.max_drift_speed = v_max;
    report.dt_used = params.dt_max;
    report.limiting_constraint = DtConstraint::fixed;
    if (params.dt_policy == DtPolicy::fixed || v_max == 0.0) return report;

    const double dt_cfl = params.cfl_safety * g.min_spacing() / v_max;
    if (dt_cfl < params.dt_max) {
        report.dt_used = dt_cfl;
        report.limiting_constraint =
            adv_at_max >= drift_at_max ? DtConstraint::advective_cfl : DtConstraint::chemotactic_cfl;
    }
    return report;
}

namespace {

void axpy(std::span<double> y, double a, std::span<const double> x) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

[[noreturn]] void monotonicity_failure(const char* what, double value, double bound) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": " << value << " vs bound " << bound;
    throw MonotonicityViolation(msg.str());
}

// Clamps values in [kClampFloor, 0) to 0 and returns the added integral.
double clamp_roundoff(ScalarField& f, const char* name) {
    double added = 0.0;
    for (double& v : f.values()) {
        if (v < 0.0) {
            if (v < kClampFloor) monotonicity_failure(name, v, kClampFloor);
            added -= v;
            v = 0.0;
        }
    }
    return added * f.grid().cell_area();
}

} // namespace

ScalarUpdate scalar_substep(const SimState& state, double dt, const SimParams& params, PoissonWorkspace& ws) {
    if (!(dt > 0.0)) throw InvalidArgument("scalar_substep needs dt > 0");
    ScalarUpdate out{state.n, state.c, state.m};

    // Explicit donor-cell transport, sub-cycled so every cycle satisfies the
    // per-cell outflow bound dt * rate <= 1.
    double remaining = dt;
    int cycles = 0;
    while (remaining > 0.0) {
        const double rate = max_outflow_rate(out.n, out.c, state.u, params);
        const double pieces = std::max(1.0, std::ceil(rate * remaining));
        const double sub = pieces == 1.0 ? remaining : remaining / pieces;
        const ScalarField adv_n = advect_scalar(out.n, state.u);
        const ScalarField chem_n = chemotaxis_divergence(out.n, out.c, params);
        const ScalarField adv_c = advect_scalar(out.c, state.u);
        const ScalarField adv_m = advect_scalar(out.m, state.u);
        for (std::size_t k = 0; k < out.n.size(); ++k) out.n[k] -= sub * (adv_n[k] + chem_n[k]);
        axpy(out.c.values(), -sub, adv_c.values());
        axpy(out.m.values(), -sub, adv_m.values());
        remaining = pieces == 1.0 ? 0.0 : remaining - sub;
        ++cycles;
    }
    out.transport_cycles = cycles;

    // Backward-Euler diffusion; c also relaxes toward m: (1 + dt - dt L) c = c~ + dt m~.
    const double tol = params.implicit_tol;
    ScalarField c_rhs = out.c;
    axpy(c_rhs.values(), dt, out.m.values());
    ScalarField m_new = implicit_diffusion_solve(out.m, 0.0, dt, ws, tol);
    ScalarField c_new = implicit_diffusion_solve(c_rhs, dt, dt, ws, tol);
    ScalarField n_new = implicit_diffusion_solve(out.n, 0.0, dt, ws, tol);

    const double mass_before = integrate_cellwise(state.n);
    const double mass_after = integrate_cellwise(n_new);
    if (!(std::abs(mass_after - mass_before) <= 1e-12 * mass_before)) {
        monotonicity_failure("n mass not conserved by transport and diffusion", mass_after, mass_before);
    }
    const double m_sup = state.m.max();
    if (!(m_new.max() <= m_sup + 1e-12)) monotonicity_failure("max m increased", m_new.max(), m_sup);
    const double c_bound = std::max(state.c.max(), m_sup);
    if (!(c_new.max() <= c_bound + 1e-12)) monotonicity_failure("max c exceeds max(c, m)", c_new.max(), c_bound);

    out.clamped = clamp_roundoff(n_new, "n below clamp floor");
    out.clamped += clamp_roundoff(m_new, "m below clamp floor");
    out.clamped += clamp_roundoff(c_new, "c below clamp floor");
    out.n = std::move(n_new);
    out.c = std::move(c_new);
    out.m = std::move(m_new);
    return out;
}

ReactionUpdate reaction_substep(const ScalarField& n, const ScalarField& m, double dt) {
    if (!(n.grid() == m.grid())) throw GridMismatch("reaction: n and m grids differ");
    ReactionUpdate out{n, m};
    for (std::size_t k = 0; k < n.size(); ++k) {
        const double nk = n[k];
        const double mk = m[k];
        if (nk < 0.0 || mk < 0.0 || std::isnan(nk) || std::isnan(mk)) {
            throw NegativeDensity("reaction with n = " + std::to_string(nk) + ", m = " + std::to_string(mk));
        }
        const double r = nk * mk / (1.0 + dt * (nk + mk));
        // Exact arithmetic keeps both nonnegative; rounding can leave -1 ulp.
        out.n[k] = std::max(0.0, nk - dt * r);
        out.m[k] = std::max(0.0, mk - dt * r);
    }
    return out;
}

namespace {

[[noreturn]] void invariant_failure(const std::string& check, double value, double bound) {
    std::ostringstream msg;
    msg.precision(17);
    msg << value << " vs bound " << bound;
    throw InvariantViolation(check, msg.str());
}

} // namespace

StepResult step_with_dt(const SimState& state, const DtReport& report, const SimParams& params,
                        PoissonWorkspace& ws) {
    const double dt = report.dt_used;
    if (!(dt > 0.0)) throw InvalidArgument("step needs dt > 0");

    Projection fluid = fluid_step(state, dt, params, ws);
    SimState next = state;
    next.u = std::move(fluid.u);
    next.p = std::move(fluid.p);

    ScalarUpdate scalars = scalar_substep(next, dt, params, ws);
    ReactionUpdate reaction = reaction_substep(scalars.n, scalars.m, dt);
    next.n = std::move(reaction.n);
    next.c = std::move(scalars.c);
    next.m = std::move(reaction.m);
    next.t = state.t + dt;
    next.step_index = state.step_index + 1;
    next.clamp_total = state.clamp_total + scalars.clamped;

    const std::vector<std::string> problems = check_state(next, params.poisson_tol);
    if (!problems.empty()) throw InvariantViolation("state", problems.front());

    const double mass_n_old = integrate_cellwise(state.n);
    const double mass_m_old = integrate_cellwise(state.m);
    const double mass_n_new = integrate_cellwise(next.n);
    const double mass_m_new = integrate_cellwise(next.m);
    if (!(mass_n_new <= mass_n_old + 1e-12 * mass_n_old + scalars.clamped)) {
        invariant_failure("mass_n monotonicity", mass_n_new, mass_n_old);
    }
    const double diff_slack = 1e-12 * (mass_n_old + mass_m_old) + scalars.clamped;
    if (!(std::abs((mass_n_new - mass_m_new) - (mass_n_old - mass_m_old)) <= diff_slack)) {
        invariant_failure("mass_diff conservation", mass_n_new - mass_m_new, mass_n_old - mass_m_old);
    }
    const double m_sup = state.m.max();
    if (!(next.m.max() <= m_sup + 1e-12)) invariant_failure("sup_m maximum principle", next.m.max(), m_sup);
    const double c_bound = std::max(state.c.max(), m_sup);
    if (!(next.c.max() <= c_bound + 1e-12)) invariant_failure("sup_c maximum principle", next.c.max(), c_bound);

    return {std::move(next), report};
}

StepResult step(const SimState& state, const SimParams& params, PoissonWorkspace& ws) {
    return step_with_dt(state, choose_dt(state, params), params, ws);
}

} // namespace cksf

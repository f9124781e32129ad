#pragma once

#include "cksf/fluid.hpp"
#include "cksf/grid.hpp"

#include <utility>

namespace cksf {

enum class DtConstraint { advective_cfl, chemotactic_cfl, fixed };

const char* to_string(DtConstraint constraint);

struct DtReport {
    double dt_used = 0.0;
    DtConstraint limiting_constraint = DtConstraint::fixed;
    /// max over faces of |u| + |S(n_donor) (grad c)_face|
    double max_drift_speed = 0.0;
};

/// Round-off negatives down to this value are clamped to 0; anything lower is
/// a MonotonicityViolation.
inline constexpr double kClampFloor = -1e-13;

DtReport choose_dt(const SimState& state, const SimParams& params);

struct ScalarUpdate {
    ScalarField n;
    ScalarField c;
    ScalarField m;
    /// Integral of the mass added by clamping in this substep.
    double clamped = 0.0;
    /// Number of explicit transport sub-cycles used.
    int transport_cycles = 1;
};

/// Transport, implicit diffusion and signal relaxation of n, c, m with the
/// velocity already in `state.u`. Reaction is not applied.
ScalarUpdate scalar_substep(const SimState& state, double dt, const SimParams& params, PoissonWorkspace& ws);

struct ReactionUpdate {
    ScalarField n;
    ScalarField m;
};

/// Patankar-type fertilization step: r = n m / (1 + dt (n + m)),
/// n -= dt r, m -= dt r.
ReactionUpdate reaction_substep(const ScalarField& n, const ScalarField& m, double dt);

struct StepResult {
    SimState state;
    DtReport report;
};

/// One Lie-split step (fluid, scalars, reaction) of length choose_dt(state).
StepResult step(const SimState& state, const SimParams& params, PoissonWorkspace& ws);

/// Same composition with a caller-supplied dt (used to land exactly on t_end).
StepResult step_with_dt(const SimState& state, const DtReport& report, const SimParams& params,
                        PoissonWorkspace& ws);

} // namespace cksf

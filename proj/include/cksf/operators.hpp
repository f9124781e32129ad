#pragma once

#include "cksf/grid.hpp"

namespace cksf {

/// S(n) = C_S (1 + n)^(-alpha). Throws NegativeDensity for n < 0.
double sensitivity(double n_value, const SimParams& params);

/// Two-point differences on interior faces; boundary faces are 0.
FaceFluxField gradient_faces(const ScalarField& f);

/// Cell-wise divergence of a face field.
ScalarField divergence_faces(const FaceField& flux);

inline ScalarField divergence_mac(const MacVelocity& u) { return divergence_faces(u); }

/// 5-point Laplacian with homogeneous Neumann (ghost reflection) boundaries.
ScalarField laplacian_neumann(const ScalarField& f);

/// Conservative donor-cell divergence of (u f). The advective tendency of f
/// is minus this field.
ScalarField advect_scalar(const ScalarField& f, const MacVelocity& u);

/// Face fluxes n_d S(n_d) (grad c)_face with n_d taken from the donor cell in
/// the direction of the chemotactic drift. Boundary faces are 0.
FaceFluxField chemotaxis_flux(const ScalarField& n, const ScalarField& c, const SimParams& params);

/// Divergence of chemotaxis_flux. The chemotactic tendency of n is minus this field.
ScalarField chemotaxis_divergence(const ScalarField& n, const ScalarField& c, const SimParams& params);

/// Largest |S(n_donor) (grad c)_face| over all faces.
double max_chemotactic_drift(const ScalarField& n, const ScalarField& c, const SimParams& params);

/**
 * Largest per-cell outflow rate (1/time) of the explicit donor-cell transport
 * of n: the sum over faces whose donor is the cell of the outgoing advective
 * and chemotactic speeds divided by the face-normal spacing. A forward-Euler
 * transport step is positive and monotone iff dt times this value is <= 1.
 */
double max_outflow_rate(const ScalarField& n, const ScalarField& c, const MacVelocity& u,
                        const SimParams& params);

} // namespace cksf

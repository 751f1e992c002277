#pragma once

#include "fwi/burst.hpp"
#include "fwi/grid.hpp"
#include "fwi/layout.hpp"
#include "fwi/shot.hpp"

namespace fwi {

constexpr double kCourantLimit = 0.95;

struct SimOptions {
    bool store_history = false;
    int history_stride = 1;
    bool allow_unstable = false;  // skip the Courant guard at the caller's risk
};

struct SimResult {
    ShotRecord record;
    WavefieldHistory history;  // empty unless store_history
};

/// Flux operator A(gamma): out = div(gamma*rho0*c0^2 * grad u) with harmonic
/// half-point material averaging and mirrored ghost points (homogeneous
/// Neumann). Harmonic edge weights keep the explicit scheme stable for
/// void-level material contrast.
void apply_flux_op(const GridSpec& g, const Field2D& gamma, double rho0, double c0,
                   const double* u, double* out);

/// Exact transpose of apply_flux_op in its u argument: out = A(gamma)^T v.
void apply_flux_op_transpose(const GridSpec& g, const Field2D& gamma, double rho0, double c0,
                             const double* v, double* out);

/// Accumulates d(v^T A(gamma) u)/dgamma_k into grad (the stiffness sensitivity).
void accumulate_flux_sensitivity(const GridSpec& g, const Field2D& gamma, double rho0, double c0,
                                 const double* u, const double* v, double* grad);

/// Directional derivative of the flux operator in gamma: out = (dA . dgamma) u.
void apply_flux_tangent(const GridSpec& g, const Field2D& gamma, const Field2D& dgamma,
                        double rho0, double c0, const double* u, double* out);

/// Explicit leapfrog solve of the density-scaled scalar wave equation with a
/// point sine-burst source, zero initial conditions and Neumann boundaries.
SimResult simulate(const MaterialField& gamma, double rho0, double c0,
                   const SineBurst& burst, GridIndex source,
                   const ReceiverSet& receivers, const SimOptions& opt = {});

/// Source-free solve from a given initial displacement (zero initial velocity).
/// Exists for boundary-condition and stability checks.
SimResult simulate_initial_value(const MaterialField& gamma, double rho0, double c0,
                                 const Field2D& u0, const ReceiverSet& receivers,
                                 const SimOptions& opt = {});

/// Directional derivative of simulate() traces with respect to gamma:
/// returns d(traces)/dgamma . dgamma as a ShotRecord-shaped perturbation.
ShotRecord jvp_traces(const MaterialField& gamma, const Field2D& dgamma, double rho0, double c0,
                      const SineBurst& burst, GridIndex source, const ReceiverSet& receivers,
                      bool allow_unstable = false);

}  // namespace fwi

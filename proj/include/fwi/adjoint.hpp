#pragma once

#include <vector>

#include "fwi/wave.hpp"

namespace fwi {

/// Per-shot residual traces (simulated minus observed).
struct ResidualSet {
    std::vector<ShotRecord> shots;
};

using AdjointHistory = WavefieldHistory;

struct GradientField {
    GridSpec grid;
    Field2D values;
};

/// L = 1/2 * sum_s sum_r sum_n (sim - obs)^2 * dt.
double misfit(const std::vector<ShotRecord>& sim, const std::vector<ShotRecord>& obs);

ResidualSet residual_set(const std::vector<ShotRecord>& sim, const std::vector<ShotRecord>& obs);

/// Time-reversed solve of the exact discrete adjoint of the forward stepper,
/// driven by residual traces injected at the receiver nodes. The returned
/// history is indexed in forward time and scaled so that an impulse residual d
/// at the final step appears as d*dt^2/(gamma*rho0*dx*dy) at the receiver.
AdjointHistory adjoint_simulate(const MaterialField& gamma, double rho0, double c0,
                                const ShotRecord& residual, const ReceiverSet& receivers,
                                bool allow_unstable = false);

/// dL/dgamma from stored primal and adjoint histories (full stride required),
/// summed over shots in order.
GradientField material_gradient(const MaterialField& gamma, double rho0, double c0,
                                const std::vector<WavefieldHistory>& primal,
                                const std::vector<AdjointHistory>& adjoint);

struct ShotGradientResult {
    Field2D grad;        // dL/dgamma for this shot
    ShotRecord traces;   // simulated traces
    double cost = 0.0;   // this shot's misfit contribution
};

/// Forward + reverse sweep for one shot without materializing the adjoint
/// history; algebraically identical to adjoint_simulate + material_gradient.
ShotGradientResult shot_gradient(const MaterialField& gamma, double rho0, double c0,
                                 const SineBurst& burst, GridIndex source,
                                 const ReceiverSet& receivers, const ShotRecord& observed,
                                 bool allow_unstable = false);

}  // namespace fwi

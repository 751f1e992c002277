#pragma once

#include <vector>

#include "fwi/physics.hpp"
#include "fwi/scenario.hpp"
#include "fwi/shot.hpp"

namespace fwi {

/// Synthetic observations on a reference grid with twice the points and time
/// steps of the inversion grid (the anti-inverse-crime rule; generation on the
/// inversion grid itself is rejected). Sources and receivers are mapped to the
/// nearest fine nodes and traces are decimated back to the coarse time axis.
std::vector<ShotRecord> generate_observation(const Scenario& scenario, const GridSpec& fine,
                                             const Acquisition& coarse, const Physics& physics,
                                             int threads = 1);

}  // namespace fwi

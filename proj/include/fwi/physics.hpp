#pragma once

#include "fwi/burst.hpp"
#include "fwi/grid.hpp"
#include "fwi/layout.hpp"

namespace fwi {

struct Physics {
    double rho0 = 2700.0;
    double c0 = 6000.0;
    SineBurst burst;
    bool allow_unstable = false;
};

/// Inversion-side acquisition geometry: grid plus source/receiver nodes.
struct Acquisition {
    GridSpec grid;
    SourceSet sources;
    ReceiverSet receivers;
};

}  // namespace fwi

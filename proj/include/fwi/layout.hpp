#pragma once

#include <cmath>
#include <set>
#include <vector>

#include "fwi/errors.hpp"
#include "fwi/grid.hpp"

namespace fwi {

struct GridIndex {
    int ix = 0;
    int iy = 0;
    bool operator==(const GridIndex&) const = default;
    auto operator<=>(const GridIndex&) const = default;
};

/// Set of distinct grid nodes acting as point sources or point receivers.
struct SensorSet {
    std::vector<GridIndex> nodes;

    int count() const { return static_cast<int>(nodes.size()); }

    void validate(const GridSpec& g) const {
        std::set<GridIndex> seen;
        for (const auto& n : nodes) {
            if (n.ix < 0 || n.ix >= g.nx || n.iy < 0 || n.iy >= g.ny)
                throw OutOfBounds("SensorSet: node outside grid");
            if (!seen.insert(n).second)
                throw ConfigError("SensorSet: duplicate node");
        }
    }
};

using SourceSet = SensorSet;
using ReceiverSet = SensorSet;

/// Nodes on the top edge (iy = ny-1), `count` of them, `spacing` grid points
/// apart, symmetric about the center of the edge.
inline SensorSet top_edge_line(const GridSpec& g, int count, int spacing) {
    SensorSet s;
    const double center = 0.5 * (g.nx - 1);
    for (int k = 0; k < count; ++k) {
        const double x = center + (k - 0.5 * (count - 1)) * spacing;
        const int ix = static_cast<int>(std::llround(x));
        s.nodes.push_back({ix, g.ny - 1});
    }
    s.validate(g);
    return s;
}

}  // namespace fwi

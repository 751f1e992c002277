#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fwi/grid.hpp"
#include "fwi/rng.hpp"

namespace fwi {

struct Ellipse {
    double a = 0.0, b = 0.0;   // semi-axes (m)
    double xc = 0.0, yc = 0.0; // center (m)
    double phi = 0.0;          // rotation (rad)
};

struct Rectangle {
    double x0 = 0.0, y0 = 0.0, w = 0.0, h = 0.0;
};

struct Circle {
    double xc = 0.0, yc = 0.0, r = 0.0;
};

using DamageShape = std::variant<Ellipse, Rectangle, Circle>;

bool shape_contains(const DamageShape& s, double x, double y);

/// Set of void regions over the plate; grid points inside any shape take the
/// void value, everything else stays background.
struct Scenario {
    std::vector<DamageShape> shapes;
    double void_value = kVoidGamma;
    double background = kBackgroundGamma;
    std::string describe() const;
};

MaterialField rasterize(const Scenario& sc, const GridSpec& grid);

/// One random ellipse, fully inside the domain with a safety margin.
Scenario sample_scenario(Rng& rng, double Lx, double Ly);

/// Fixed study cases, in physical coordinates (profile independent).
/// 1: single ellipse. 2: rectangle + circle. 3: three ellipses.
/// 4: crossing rectangles with aligned circles.
Scenario study_case(int id, double Lx, double Ly);

}  // namespace fwi

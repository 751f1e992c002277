#include "fwi/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fwi {

bool shape_contains(const DamageShape& s, double x, double y) {
    return std::visit(
        [&](const auto& sh) -> bool {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Ellipse>) {
                const double c = std::cos(-sh.phi), sn = std::sin(-sh.phi);
                const double dx = x - sh.xc, dy = y - sh.yc;
                const double xr = c * dx - sn * dy, yr = sn * dx + c * dy;
                const double ta = xr / sh.a, tb = yr / sh.b;
                return ta * ta + tb * tb <= 1.0;
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                return x >= sh.x0 && x <= sh.x0 + sh.w && y >= sh.y0 && y <= sh.y0 + sh.h;
            } else {
                const double dx = x - sh.xc, dy = y - sh.yc;
                return dx * dx + dy * dy <= sh.r * sh.r;
            }
        },
        s);
}

std::string Scenario::describe() const {
    std::ostringstream os;
    os.precision(9);
    for (const auto& s : shapes) {
        std::visit(
            [&](const auto& sh) {
                using T = std::decay_t<decltype(sh)>;
                if constexpr (std::is_same_v<T, Ellipse>) {
                    os << "ellipse a=" << sh.a << " b=" << sh.b << " xc=" << sh.xc
                       << " yc=" << sh.yc << " phi=" << sh.phi << "; ";
                } else if constexpr (std::is_same_v<T, Rectangle>) {
                    os << "rect x0=" << sh.x0 << " y0=" << sh.y0 << " w=" << sh.w
                       << " h=" << sh.h << "; ";
                } else {
                    os << "circle xc=" << sh.xc << " yc=" << sh.yc << " r=" << sh.r << "; ";
                }
            },
            s);
    }
    return os.str();
}

MaterialField rasterize(const Scenario& sc, const GridSpec& grid) {
    grid.validate();
    MaterialField f(grid, sc.background);
    const double dx = grid.dx(), dy = grid.dy();
    std::size_t voids = 0;
    for (int ix = 0; ix < grid.nx; ++ix)
        for (int iy = 0; iy < grid.ny; ++iy) {
            const double x = ix * dx, y = iy * dy;
            for (const auto& s : sc.shapes)
                if (shape_contains(s, x, y)) {
                    f.values.at(ix, iy) = sc.void_value;
                    ++voids;
                    break;
                }
        }
    if (voids * 2 >= grid.points())
        throw ConfigError("rasterize: void fraction reached 50%, domain left empty");
    return f;
}

Scenario sample_scenario(Rng& rng, double Lx, double Ly) {
    Ellipse e;
    e.a = rng.uniform(0.003, 0.012);
    e.b = rng.uniform(0.003, 0.012);
    const double margin = std::max(e.a, e.b) + 0.005;
    e.xc = rng.uniform(margin, Lx - margin);
    e.yc = rng.uniform(margin, Ly - margin);
    e.phi = rng.uniform(0.0, std::numbers::pi);
    Scenario sc;
    sc.shapes.push_back(e);
    return sc;
}

Scenario study_case(int id, double Lx, double Ly) {
    Scenario sc;
    const double cx = 0.5 * Lx, cy = 0.5 * Ly;
    switch (id) {
        case 1:
            sc.shapes.push_back(Ellipse{0.010, 0.005, cx + 0.01, cy - 0.004, 0.5});
            break;
        case 2:
            sc.shapes.push_back(Rectangle{cx - 0.028, cy - 0.009, 0.016, 0.016});
            sc.shapes.push_back(Circle{cx + 0.022, cy + 0.004, 0.006});
            break;
        case 3:
            sc.shapes.push_back(Ellipse{0.008, 0.004, cx - 0.025, cy + 0.006, 0.3});
            sc.shapes.push_back(Ellipse{0.005, 0.005, cx + 0.005, cy - 0.008, 0.0});
            sc.shapes.push_back(Ellipse{0.006, 0.003, cx + 0.030, cy + 0.005, 2.2});
            break;
        case 4:
            sc.shapes.push_back(Rectangle{cx - 0.032, cy - 0.002, 0.020, 0.012});
            sc.shapes.push_back(Rectangle{cx - 0.026, cy - 0.010, 0.012, 0.020});
            sc.shapes.push_back(Circle{cx + 0.008, cy, 0.006});
            sc.shapes.push_back(Circle{cx + 0.020, cy, 0.004});
            sc.shapes.push_back(Circle{cx + 0.029, cy, 0.0025});
            sc.shapes.push_back(Circle{cx - 0.040, cy + 0.008, 0.004});
            sc.shapes.push_back(Circle{cx + 0.040, cy + 0.008, 0.004});
            break;
        default:
            throw ConfigError("study_case: unknown case id " + std::to_string(id));
    }
    return sc;
}

}  // namespace fwi

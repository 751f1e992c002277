#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fwi/errors.hpp"

namespace fwi {

/// Regular grid over [0,Lx] x [0,Ly] including both boundary lines,
/// so dx = Lx/(nx-1) and point (ix,iy) sits at (ix*dx, iy*dy).
struct GridSpec {
    double Lx = 0.0;
    double Ly = 0.0;
    int nx = 0;
    int ny = 0;
    double dt = 0.0;
    int nt = 0;

    double dx() const { return Lx / (nx - 1); }
    double dy() const { return Ly / (ny - 1); }
    double cell_area() const { return dx() * dy(); }
    std::size_t points() const { return static_cast<std::size_t>(nx) * ny; }

    void validate() const {
        if (nx < 3 || ny < 3) throw ConfigError("GridSpec: nx and ny must be >= 3");
        if (nt < 1) throw ConfigError("GridSpec: nt must be >= 1");
        if (dt <= 0.0) throw ConfigError("GridSpec: dt must be positive");
        if (Lx <= 0.0 || Ly <= 0.0) throw ConfigError("GridSpec: extents must be positive");
    }

    bool same_mesh(const GridSpec& o) const {
        return nx == o.nx && ny == o.ny && Lx == o.Lx && Ly == o.Ly;
    }
};

inline double courant_number(const GridSpec& g, double c0) {
    const double dx = g.dx(), dy = g.dy();
    return c0 * g.dt * std::sqrt(1.0 / (dx * dx) + 1.0 / (dy * dy));
}

/// Scalar field sampled at the grid points, value(ix,iy) with iy contiguous.
struct Field2D {
    int nx = 0;
    int ny = 0;
    std::vector<double> v;

    Field2D() = default;
    Field2D(int nx_, int ny_, double fill = 0.0)
        : nx(nx_), ny(ny_), v(static_cast<std::size_t>(nx_) * ny_, fill) {}

    double& at(int ix, int iy) { return v[static_cast<std::size_t>(ix) * ny + iy]; }
    double at(int ix, int iy) const { return v[static_cast<std::size_t>(ix) * ny + iy]; }
    std::size_t size() const { return v.size(); }

    bool same_shape(const Field2D& o) const { return nx == o.nx && ny == o.ny; }
};

constexpr double kVoidGamma = 1e-5;
constexpr double kBackgroundGamma = 1.0;

/// Density scaling gamma on a grid; strictly positive everywhere.
struct MaterialField {
    GridSpec grid;
    Field2D values;

    MaterialField() = default;
    MaterialField(const GridSpec& g, double fill = kBackgroundGamma)
        : grid(g), values(g.nx, g.ny, fill) {}

    void check_positive() const {
        for (double x : values.v)
            if (!(x > 0.0)) throw NonPositiveGamma("MaterialField: gamma must be strictly positive");
    }
};

inline double mse_between(const Field2D& a, const Field2D& b) {
    if (!a.same_shape(b)) throw ShapeMismatch("mse: field shapes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

}  // namespace fwi

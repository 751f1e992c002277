#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fwi/errors.hpp"
#include "fwi/grid.hpp"
#include "fwi/layout.hpp"

namespace fwi {

/// Receiver time traces for one source excitation, trace(r, n) with n contiguous.
struct ShotRecord {
    int source_index = 0;
    int nr = 0;
    int nt = 0;
    double dt = 0.0;
    std::vector<double> samples;  // nr * nt

    ShotRecord() = default;
    ShotRecord(int src, int nr_, int nt_, double dt_)
        : source_index(src), nr(nr_), nt(nt_), dt(dt_),
          samples(static_cast<std::size_t>(nr_) * nt_, 0.0) {}

    double& at(int r, int n) { return samples[static_cast<std::size_t>(r) * nt + n]; }
    double at(int r, int n) const { return samples[static_cast<std::size_t>(r) * nt + n]; }

    bool same_shape(const ShotRecord& o) const {
        return nr == o.nr && nt == o.nt && dt == o.dt;
    }

    void check_finite() const {
        for (double x : samples)
            if (!std::isfinite(x)) throw SolverError("ShotRecord: non-finite sample");
    }
};

/// Full wavefield snapshots u(n, ix, iy) for n = 0..nt-1 at the given stride.
struct WavefieldHistory {
    int nx = 0;
    int ny = 0;
    int nt = 0;
    int stride = 1;
    std::vector<double> data;  // stored_steps * nx * ny

    WavefieldHistory() = default;
    WavefieldHistory(int nx_, int ny_, int nt_, int stride_ = 1)
        : nx(nx_), ny(ny_), nt(nt_), stride(stride_),
          data(static_cast<std::size_t>(stored_steps()) * nx_ * ny_, 0.0) {}

    int stored_steps() const { return (nt + stride - 1) / stride; }

    double* step(int n) {
        return data.data() + static_cast<std::size_t>(n / stride) * nx * ny;
    }
    const double* step(int n) const {
        return data.data() + static_cast<std::size_t>(n / stride) * nx * ny;
    }
};

}  // namespace fwi

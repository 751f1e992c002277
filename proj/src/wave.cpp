#include "fwi/wave.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace fwi {

namespace {

inline int mirror(int i, int d, int n) {
    const int j = i + d;
    if (j < 0) return 1;
    if (j >= n) return n - 2;
    return j;
}

// Harmonic half-point average: couples fluxes correctly across material jumps
// and keeps the explicit scheme stable for void-level contrast, which the
// arithmetic mean does not.
inline double edge_weight(double a, double b) { return 2.0 * a * b / (a + b); }

void check_sim_inputs(const MaterialField& gamma, double rho0, double c0,
                      GridIndex source, const ReceiverSet& receivers, const SimOptions& opt) {
    const GridSpec& g = gamma.grid;
    g.validate();
    if (gamma.values.nx != g.nx || gamma.values.ny != g.ny)
        throw ShapeMismatch("simulate: gamma shape does not match grid");
    gamma.check_positive();
    if (source.ix < 0 || source.ix >= g.nx || source.iy < 0 || source.iy >= g.ny)
        throw OutOfBounds("simulate: source outside grid");
    receivers.validate(g);
    if (!opt.allow_unstable && courant_number(g, c0) > kCourantLimit)
        throw UnstableConfig("simulate: Courant number " + std::to_string(courant_number(g, c0)) +
                             " exceeds " + std::to_string(kCourantLimit));
    if (!(rho0 > 0.0) || !(c0 > 0.0)) throw ConfigError("simulate: rho0 and c0 must be positive");
}

}  // namespace

void apply_flux_op(const GridSpec& g, const Field2D& gamma, double rho0, double c0,
                   const double* u, double* out) {
    const int nx = g.nx, ny = g.ny;
    const double cx = rho0 * c0 * c0 / (g.dx() * g.dx());
    const double cy = rho0 * c0 * c0 / (g.dy() * g.dy());
    for (int ix = 0; ix < nx; ++ix) {
        const int il = mirror(ix, -1, nx), ir = mirror(ix, +1, nx);
        const double* uc = u + static_cast<std::size_t>(ix) * ny;
        const double* ul = u + static_cast<std::size_t>(il) * ny;
        const double* ur = u + static_cast<std::size_t>(ir) * ny;
        const double* gc = gamma.v.data() + static_cast<std::size_t>(ix) * ny;
        const double* gl = gamma.v.data() + static_cast<std::size_t>(il) * ny;
        const double* gr = gamma.v.data() + static_cast<std::size_t>(ir) * ny;
        double* o = out + static_cast<std::size_t>(ix) * ny;
        for (int iy = 0; iy < ny; ++iy) {
            const int jd = mirror(iy, -1, ny), ju = mirror(iy, +1, ny);
            const double gij = gc[iy], uij = uc[iy];
            double acc = cx * (edge_weight(gij, gl[iy]) * (ul[iy] - uij) +
                               edge_weight(gij, gr[iy]) * (ur[iy] - uij));
            acc += cy * (edge_weight(gij, gc[jd]) * (uc[jd] - uij) +
                         edge_weight(gij, gc[ju]) * (uc[ju] - uij));
            o[iy] = acc;
        }
    }
}

void apply_flux_op_transpose(const GridSpec& g, const Field2D& gamma, double rho0, double c0,
                             const double* v, double* out) {
    const int nx = g.nx, ny = g.ny;
    const double cx = rho0 * c0 * c0 / (g.dx() * g.dx());
    const double cy = rho0 * c0 * c0 / (g.dy() * g.dy());
    std::memset(out, 0, sizeof(double) * g.points());
    // Scatter form: each forward term v_ij * c * ge * (u_m - u_ij) contributes
    // +c*ge*v_ij to column m and -c*ge*v_ij to column ij.
    for (int ix = 0; ix < nx; ++ix) {
        const int il = mirror(ix, -1, nx), ir = mirror(ix, +1, nx);
        const double* vc = v + static_cast<std::size_t>(ix) * ny;
        const double* gc = gamma.v.data() + static_cast<std::size_t>(ix) * ny;
        const double* gl = gamma.v.data() + static_cast<std::size_t>(il) * ny;
        const double* gr = gamma.v.data() + static_cast<std::size_t>(ir) * ny;
        double* oc = out + static_cast<std::size_t>(ix) * ny;
        double* ol = out + static_cast<std::size_t>(il) * ny;
        double* orr = out + static_cast<std::size_t>(ir) * ny;
        for (int iy = 0; iy < ny; ++iy) {
            const int jd = mirror(iy, -1, ny), ju = mirror(iy, +1, ny);
            const double gij = gc[iy], vij = vc[iy];
            const double wl = cx * edge_weight(gij, gl[iy]) * vij;
            const double wr = cx * edge_weight(gij, gr[iy]) * vij;
            const double wd = cy * edge_weight(gij, gc[jd]) * vij;
            const double wu = cy * edge_weight(gij, gc[ju]) * vij;
            ol[iy] += wl;
            orr[iy] += wr;
            oc[jd] += wd;
            oc[ju] += wu;
            oc[iy] -= wl + wr + wd + wu;
        }
    }
}

void accumulate_flux_sensitivity(const GridSpec& g, const Field2D& gamma, double rho0, double c0,
                                 const double* u, const double* v, double* grad) {
    const int nx = g.nx, ny = g.ny;
    const double cx = rho0 * c0 * c0 / (g.dx() * g.dx());
    const double cy = rho0 * c0 * c0 / (g.dy() * g.dy());
    // d(edge)/da = 2b^2/(a+b)^2 and symmetrically for b; mirrored endpoints
    // fold their share back into the domain.
    for (int ix = 0; ix < nx; ++ix) {
        const int il = mirror(ix, -1, nx), ir = mirror(ix, +1, nx);
        const double* uc = u + static_cast<std::size_t>(ix) * ny;
        const double* ul = u + static_cast<std::size_t>(il) * ny;
        const double* ur = u + static_cast<std::size_t>(ir) * ny;
        const double* vc = v + static_cast<std::size_t>(ix) * ny;
        const double* gc = gamma.v.data() + static_cast<std::size_t>(ix) * ny;
        const double* gl = gamma.v.data() + static_cast<std::size_t>(il) * ny;
        const double* gr = gamma.v.data() + static_cast<std::size_t>(ir) * ny;
        double* gdc = grad + static_cast<std::size_t>(ix) * ny;
        double* gdl = grad + static_cast<std::size_t>(il) * ny;
        double* gdr = grad + static_cast<std::size_t>(ir) * ny;
        for (int iy = 0; iy < ny; ++iy) {
            const int jd = mirror(iy, -1, ny), ju = mirror(iy, +1, ny);
            const double uij = uc[iy], vij = vc[iy], gij = gc[iy];
            const auto accumulate = [&](double coef, double g_nbr, double u_nbr, double* slot_c,
                                        double* slot_n) {
                const double term = coef * vij * (u_nbr - uij);
                const double den = gij + g_nbr;
                const double inv2 = 2.0 / (den * den);
                *slot_c += term * g_nbr * g_nbr * inv2;
                *slot_n += term * gij * gij * inv2;
            };
            accumulate(cx, gl[iy], ul[iy], gdc + iy, gdl + iy);
            accumulate(cx, gr[iy], ur[iy], gdc + iy, gdr + iy);
            accumulate(cy, gc[jd], uc[jd], gdc + iy, gdc + jd);
            accumulate(cy, gc[ju], uc[ju], gdc + iy, gdc + ju);
        }
    }
}

void apply_flux_tangent(const GridSpec& g, const Field2D& gamma, const Field2D& dgamma,
                        double rho0, double c0, const double* u, double* out) {
    const int nx = g.nx, ny = g.ny;
    const double cx = rho0 * c0 * c0 / (g.dx() * g.dx());
    const double cy = rho0 * c0 * c0 / (g.dy() * g.dy());
    for (int ix = 0; ix < nx; ++ix) {
        const int il = mirror(ix, -1, nx), ir = mirror(ix, +1, nx);
        const double* uc = u + static_cast<std::size_t>(ix) * ny;
        const double* ul = u + static_cast<std::size_t>(il) * ny;
        const double* ur = u + static_cast<std::size_t>(ir) * ny;
        const double* gc = gamma.v.data() + static_cast<std::size_t>(ix) * ny;
        const double* gl = gamma.v.data() + static_cast<std::size_t>(il) * ny;
        const double* gr = gamma.v.data() + static_cast<std::size_t>(ir) * ny;
        const double* dc = dgamma.v.data() + static_cast<std::size_t>(ix) * ny;
        const double* dl = dgamma.v.data() + static_cast<std::size_t>(il) * ny;
        const double* dr = dgamma.v.data() + static_cast<std::size_t>(ir) * ny;
        double* o = out + static_cast<std::size_t>(ix) * ny;
        for (int iy = 0; iy < ny; ++iy) {
            const int jd = mirror(iy, -1, ny), ju = mirror(iy, +1, ny);
            const double gij = gc[iy], dij = dc[iy], uij = uc[iy];
            const auto dedge = [&](double g_nbr, double d_nbr) {
                const double den = gij + g_nbr;
                return 2.0 * (g_nbr * g_nbr * dij + gij * gij * d_nbr) / (den * den);
            };
            double acc = cx * (dedge(gl[iy], dl[iy]) * (ul[iy] - uij) +
                               dedge(gr[iy], dr[iy]) * (ur[iy] - uij));
            acc += cy * (dedge(gc[jd], dc[jd]) * (uc[jd] - uij) +
                         dedge(gc[ju], dc[ju]) * (uc[ju] - uij));
            o[iy] = acc;
        }
    }
}

SimResult simulate(const MaterialField& gamma, double rho0, double c0,
                   const SineBurst& burst, GridIndex source,
                   const ReceiverSet& receivers, const SimOptions& opt) {
    check_sim_inputs(gamma, rho0, c0, source, receivers, opt);
    burst.validate();
    const GridSpec& g = gamma.grid;
    const int nt = g.nt;
    const std::size_t np = g.points();
    const double dt = g.dt;
    const double inv_area = 1.0 / g.cell_area();
    const std::size_t src = static_cast<std::size_t>(source.ix) * g.ny + source.iy;

    SimResult res;
    res.record = ShotRecord(0, receivers.count(), nt, dt);
    if (opt.store_history) res.history = WavefieldHistory(g.nx, g.ny, nt, opt.history_stride);

    std::vector<double> u_prev(np, 0.0), u_cur(np, 0.0), flux(np, 0.0);
    const auto sample = [&](int n, const std::vector<double>& u) {
        for (int r = 0; r < receivers.count(); ++r) {
            const auto& node = receivers.nodes[r];
            res.record.at(r, n) = u[static_cast<std::size_t>(node.ix) * g.ny + node.iy];
        }
        if (opt.store_history && n % opt.history_stride == 0)
            std::copy(u.begin(), u.end(), res.history.step(n));
    };
    sample(0, u_cur);

    for (int n = 0; n < nt - 1; ++n) {
        apply_flux_op(g, gamma.values, rho0, c0, u_cur.data(), flux.data());
        flux[src] += burst_force(n * dt, burst) * inv_area;
        for (std::size_t i = 0; i < np; ++i) {
            const double u_next = 2.0 * u_cur[i] - u_prev[i] +
                                  dt * dt / (gamma.values.v[i] * rho0) * flux[i];
            u_prev[i] = u_cur[i];
            u_cur[i] = u_next;
        }
        sample(n + 1, u_cur);
    }
    res.record.check_finite();
    return res;
}

SimResult simulate_initial_value(const MaterialField& gamma, double rho0, double c0,
                                 const Field2D& u0, const ReceiverSet& receivers,
                                 const SimOptions& opt) {
    check_sim_inputs(gamma, rho0, c0, {0, 0}, receivers, opt);
    const GridSpec& g = gamma.grid;
    if (u0.nx != g.nx || u0.ny != g.ny) throw ShapeMismatch("simulate_initial_value: u0 shape");
    const int nt = g.nt;
    const std::size_t np = g.points();
    const double dt = g.dt;

    SimResult res;
    res.record = ShotRecord(0, receivers.count(), nt, dt);
    if (opt.store_history) res.history = WavefieldHistory(g.nx, g.ny, nt, opt.history_stride);

    std::vector<double> u_prev(u0.v), u_cur(u0.v), flux(np, 0.0);
    const auto sample = [&](int n, const std::vector<double>& u) {
        for (int r = 0; r < receivers.count(); ++r) {
            const auto& node = receivers.nodes[r];
            res.record.at(r, n) = u[static_cast<std::size_t>(node.ix) * g.ny + node.iy];
        }
        if (opt.store_history && n % opt.history_stride == 0)
            std::copy(u.begin(), u.end(), res.history.step(n));
    };
    sample(0, u_cur);
    for (int n = 0; n < nt - 1; ++n) {
        apply_flux_op(g, gamma.values, rho0, c0, u_cur.data(), flux.data());
        for (std::size_t i = 0; i < np; ++i) {
            const double u_next = 2.0 * u_cur[i] - u_prev[i] +
                                  dt * dt / (gamma.values.v[i] * rho0) * flux[i];
            u_prev[i] = u_cur[i];
            u_cur[i] = u_next;
        }
        sample(n + 1, u_cur);
    }
    res.record.check_finite();
    return res;
}

ShotRecord jvp_traces(const MaterialField& gamma, const Field2D& dgamma, double rho0, double c0,
                      const SineBurst& burst, GridIndex source, const ReceiverSet& receivers,
                      bool allow_unstable) {
    SimOptions opt;
    opt.allow_unstable = allow_unstable;
    check_sim_inputs(gamma, rho0, c0, source, receivers, opt);
    const GridSpec& g = gamma.grid;
    if (dgamma.nx != g.nx || dgamma.ny != g.ny) throw ShapeMismatch("jvp_traces: dgamma shape");
    const int nt = g.nt;
    const std::size_t np = g.points();
    const double dt = g.dt;
    const double inv_area = 1.0 / g.cell_area();
    const std::size_t src = static_cast<std::size_t>(source.ix) * g.ny + source.iy;

    ShotRecord dtr(0, receivers.count(), nt, dt);
    std::vector<double> u_prev(np, 0.0), u_cur(np, 0.0);
    std::vector<double> du_prev(np, 0.0), du_cur(np, 0.0);
    std::vector<double> flux(np, 0.0), dflux(np, 0.0), tflux(np, 0.0);

    for (int n = 0; n < nt - 1; ++n) {
        apply_flux_op(g, gamma.values, rho0, c0, u_cur.data(), flux.data());
        flux[src] += burst_force(n * dt, burst) * inv_area;
        apply_flux_op(g, gamma.values, rho0, c0, du_cur.data(), dflux.data());
        apply_flux_tangent(g, gamma.values, dgamma, rho0, c0, u_cur.data(), tflux.data());
        for (std::size_t i = 0; i < np; ++i) {
            const double minv = dt * dt / (gamma.values.v[i] * rho0);
            const double r = minv * flux[i];
            const double u_next = 2.0 * u_cur[i] - u_prev[i] + r;
            const double du_next = 2.0 * du_cur[i] - du_prev[i] + minv * (dflux[i] + tflux[i]) -
                                   dgamma.v[i] / gamma.values.v[i] * r;
            u_prev[i] = u_cur[i];
            u_cur[i] = u_next;
            du_prev[i] = du_cur[i];
            du_cur[i] = du_next;
        }
        for (int r = 0; r < receivers.count(); ++r) {
            const auto& node = receivers.nodes[r];
            dtr.at(r, n + 1) = du_cur[static_cast<std::size_t>(node.ix) * g.ny + node.iy];
        }
    }
    dtr.check_finite();
    return dtr;
}

}  // namespace fwi

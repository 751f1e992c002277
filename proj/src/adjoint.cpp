#include "fwi/adjoint.hpp"

#include <algorithm>
#include <cmath>

namespace fwi {

namespace {

void check_pairing(const std::vector<ShotRecord>& sim, const std::vector<ShotRecord>& obs) {
    if (sim.size() != obs.size()) throw ShapeMismatch("misfit: shot count mismatch");
    for (std::size_t s = 0; s < sim.size(); ++s)
        if (!sim[s].same_shape(obs[s])) throw ShapeMismatch("misfit: trace shape mismatch");
}

}  // namespace

double misfit(const std::vector<ShotRecord>& sim, const std::vector<ShotRecord>& obs) {
    check_pairing(sim, obs);
    double acc = 0.0;
    for (std::size_t s = 0; s < sim.size(); ++s) {
        double shot_acc = 0.0;
        for (std::size_t i = 0; i < sim[s].samples.size(); ++i) {
            const double r = sim[s].samples[i] - obs[s].samples[i];
            shot_acc += r * r;
        }
        acc += 0.5 * shot_acc * sim[s].dt;
    }
    return acc;
}

ResidualSet residual_set(const std::vector<ShotRecord>& sim, const std::vector<ShotRecord>& obs) {
    check_pairing(sim, obs);
    ResidualSet rs;
    rs.shots.reserve(sim.size());
    for (std::size_t s = 0; s < sim.size(); ++s) {
        ShotRecord r = sim[s];
        for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] -= obs[s].samples[i];
        rs.shots.push_back(std::move(r));
    }
    return rs;
}

// Reverse recursion for the discrete adjoint variable:
//   lam^n = dt*res^n(at receivers) + 2 lam^{n+1} - lam^{n+2} + A^T (Minv lam^{n+1})
// with Minv = dt^2/(gamma*rho0) applied pointwise. The stored field is
// u+^n = lam^n * dt/(gamma*rho0*dx*dy).
AdjointHistory adjoint_simulate(const MaterialField& gamma, double rho0, double c0,
                                const ShotRecord& residual, const ReceiverSet& receivers,
                                bool allow_unstable) {
    const GridSpec& g = gamma.grid;
    g.validate();
    gamma.check_positive();
    receivers.validate(g);
    if (residual.nr != receivers.count() || residual.nt != g.nt)
        throw ShapeMismatch("adjoint_simulate: residual shape mismatch");
    if (!allow_unstable && courant_number(g, c0) > kCourantLimit)
        throw UnstableConfig("adjoint_simulate: Courant limit exceeded");

    const int nt = g.nt;
    const std::size_t np = g.points();
    const double dt = g.dt;
    const double out_scale = dt / (rho0 * g.cell_area());

    AdjointHistory hist(g.nx, g.ny, nt, 1);
    std::vector<double> lam_n1(np, 0.0), lam_n2(np, 0.0), scaled(np, 0.0), flux(np, 0.0);

    for (int n = nt - 1; n >= 0; --n) {
        for (std::size_t i = 0; i < np; ++i)
            scaled[i] = dt * dt / (gamma.values.v[i] * rho0) * lam_n1[i];
        apply_flux_op_transpose(g, gamma.values, rho0, c0, scaled.data(), flux.data());
        double* lam = hist.step(n);
        for (std::size_t i = 0; i < np; ++i) lam[i] = 2.0 * lam_n1[i] - lam_n2[i] + flux[i];
        for (int r = 0; r < receivers.count(); ++r) {
            const auto& node = receivers.nodes[r];
            lam[static_cast<std::size_t>(node.ix) * g.ny + node.iy] += dt * residual.at(r, n);
        }
        std::copy(lam, lam + np, lam_n2.begin());
        lam_n2.swap(lam_n1);
        for (std::size_t i = 0; i < np; ++i)
            lam[i] *= out_scale / gamma.values.v[i];
    }
    return hist;
}

namespace {

// Contribution of time level n (0-based, n <= nt-2) given lam^{n+1}:
//   g_k += -(1/gamma_k) lam_k (u^{n+1} - 2u^n + u^{n-1})_k
//          + d/dgamma_k [ (Minv lam)^T A(gamma) u^n ]
void accumulate_level(const GridSpec& g, const Field2D& gamma, double rho0, double c0,
                      const double* lam_np1, const double* u_np1, const double* u_n,
                      const double* u_nm1, std::vector<double>& scaled, double* grad) {
    const std::size_t np = g.points();
    const double dt = g.dt;
    for (std::size_t i = 0; i < np; ++i) {
        const double d2u = u_np1[i] - 2.0 * u_n[i] + (u_nm1 ? u_nm1[i] : 0.0);
        grad[i] -= lam_np1[i] * d2u / gamma.v[i];
        scaled[i] = dt * dt / (gamma.v[i] * rho0) * lam_np1[i];
    }
    accumulate_flux_sensitivity(g, gamma, rho0, c0, u_n, scaled.data(), grad);
}

}  // namespace

GradientField material_gradient(const MaterialField& gamma, double rho0, double c0,
                                const std::vector<WavefieldHistory>& primal,
                                const std::vector<AdjointHistory>& adjoint) {
    const GridSpec& g = gamma.grid;
    if (primal.size() != adjoint.size())
        throw ShapeMismatch("material_gradient: shot count mismatch");
    GradientField gf{g, Field2D(g.nx, g.ny, 0.0)};
    const std::size_t np = g.points();
    const double dt = g.dt;
    const double lam_scale = rho0 * g.cell_area() / dt;

    std::vector<double> lam(np), scaled(np);
    for (std::size_t s = 0; s < primal.size(); ++s) {
        const auto& up = primal[s];
        const auto& ua = adjoint[s];
        if (up.nx != g.nx || up.ny != g.ny || up.nt != g.nt || up.stride != 1 ||
            ua.nx != g.nx || ua.ny != g.ny || ua.nt != g.nt || ua.stride != 1)
            throw SolverError("material_gradient: full-stride histories on the grid required");
        for (int n = 0; n < g.nt - 1; ++n) {
            const double* adj = ua.step(n + 1);
            for (std::size_t i = 0; i < np; ++i)
                lam[i] = adj[i] * lam_scale * gamma.values.v[i];
            accumulate_level(g, gamma.values, rho0, c0, lam.data(), up.step(n + 1), up.step(n),
                             n > 0 ? up.step(n - 1) : nullptr, scaled, gf.values.v.data());
        }
    }
    return gf;
}

ShotGradientResult shot_gradient(const MaterialField& gamma, double rho0, double c0,
                                 const SineBurst& burst, GridIndex source,
                                 const ReceiverSet& receivers, const ShotRecord& observed,
                                 bool allow_unstable) {
    const GridSpec& g = gamma.grid;
    SimOptions opt;
    opt.store_history = true;
    opt.allow_unstable = allow_unstable;
    SimResult fwd = simulate(gamma, rho0, c0, burst, source, receivers, opt);
    if (!fwd.record.same_shape(observed)) throw ShapeMismatch("shot_gradient: observed shape");

    ShotGradientResult out;
    out.traces = fwd.record;
    double acc = 0.0;
    ShotRecord res = fwd.record;
    for (std::size_t i = 0; i < res.samples.size(); ++i) {
        res.samples[i] -= observed.samples[i];
        acc += res.samples[i] * res.samples[i];
    }
    out.cost = 0.5 * acc * g.dt;
    out.grad = Field2D(g.nx, g.ny, 0.0);

    const int nt = g.nt;
    const std::size_t np = g.points();
    const double dt = g.dt;
    std::vector<double> lam_n1(np, 0.0), lam_n2(np, 0.0), lam(np, 0.0), scaled(np, 0.0),
        flux(np, 0.0);

    for (int n = nt - 1; n >= 1; --n) {
        for (std::size_t i = 0; i < np; ++i)
            scaled[i] = dt * dt / (gamma.values.v[i] * rho0) * lam_n1[i];
        apply_flux_op_transpose(g, gamma.values, rho0, c0, scaled.data(), flux.data());
        for (std::size_t i = 0; i < np; ++i) lam[i] = 2.0 * lam_n1[i] - lam_n2[i] + flux[i];
        for (int r = 0; r < receivers.count(); ++r) {
            const auto& node = receivers.nodes[r];
            lam[static_cast<std::size_t>(node.ix) * g.ny + node.iy] += dt * res.at(r, n);
        }
        accumulate_level(g, gamma.values, rho0, c0, lam.data(), fwd.history.step(n),
                         fwd.history.step(n - 1), n >= 2 ? fwd.history.step(n - 2) : nullptr,
                         scaled, out.grad.v.data());
        std::copy(lam.begin(), lam.end(), lam_n2.begin());
        lam_n2.swap(lam_n1);
    }
    return out;
}

}  // namespace fwi

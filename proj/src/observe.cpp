#include "fwi/observe.hpp"

#include <cmath>

#include "fwi/parallel.hpp"
#include "fwi/wave.hpp"

namespace fwi {

namespace {

GridIndex to_fine(const GridSpec& coarse, const GridSpec& fine, GridIndex n) {
    const double x = n.ix * coarse.dx(), y = n.iy * coarse.dy();
    int fx = static_cast<int>(std::llround(x / fine.dx()));
    int fy = static_cast<int>(std::llround(y / fine.dy()));
    fx = std::clamp(fx, 0, fine.nx - 1);
    fy = std::clamp(fy, 0, fine.ny - 1);
    return {fx, fy};
}

}  // namespace

std::vector<ShotRecord> generate_observation(const Scenario& scenario, const GridSpec& fine,
                                             const Acquisition& coarse, const Physics& physics,
                                             int threads) {
    const GridSpec& cg = coarse.grid;
    cg.validate();
    fine.validate();
    if (fine.same_mesh(cg) && fine.nt == cg.nt && fine.dt == cg.dt)
        throw ConfigError("generate_observation: observation grid must differ from the inversion grid");
    if (fine.nx != 2 * cg.nx || fine.ny != 2 * cg.ny || fine.nt != 2 * cg.nt)
        throw ConfigError("generate_observation: reference grid must have 2x points and 2x steps");
    if (std::abs(2.0 * fine.dt - cg.dt) > 1e-12 * cg.dt)
        throw ConfigError("generate_observation: reference dt must be half the inversion dt");
    if (fine.Lx != cg.Lx || fine.Ly != cg.Ly)
        throw ConfigError("generate_observation: physical extents differ");

    const MaterialField truth_fine = rasterize(scenario, fine);
    ReceiverSet fine_rec;
    for (const auto& r : coarse.receivers.nodes) fine_rec.nodes.push_back(to_fine(cg, fine, r));

    std::vector<ShotRecord> out(coarse.sources.nodes.size());
    parallel_for(static_cast<int>(coarse.sources.nodes.size()), threads, [&](int s) {
        const GridIndex src = to_fine(cg, fine, coarse.sources.nodes[s]);
        SimOptions opt;
        opt.allow_unstable = physics.allow_unstable;
        const SimResult fine_run =
            simulate(truth_fine, physics.rho0, physics.c0, physics.burst, src, fine_rec, opt);
        ShotRecord rec(s, fine_rec.count(), cg.nt, cg.dt);
        for (int r = 0; r < rec.nr; ++r)
            for (int n = 0; n < cg.nt; ++n) rec.at(r, n) = fine_run.record.at(r, 2 * n);
        out[s] = std::move(rec);
    });
    return out;
}

}  // namespace fwi

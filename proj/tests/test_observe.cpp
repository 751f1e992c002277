#include <doctest.h>

#include <cmath>

#include "fwi/config.hpp"
#include "fwi/observe.hpp"
#include "fwi/wave.hpp"
#include "test_support.hpp"

using namespace fwi;
using fwi::test::rel_l2;

namespace {

ExperimentConfig small_cfg() {
    ExperimentConfig c = profile_config("desk");
    // quarter-size setup to keep the tests quick
    c.nx = 64;
    c.ny = 32;
    c.nt = 250;
    c.dt = 2.0 * c.dt;  // same Courant on the halved grid
    c.fine_nx = 128;
    c.fine_ny = 64;
    c.fine_nt = 500;
    c.fine_dt = c.dt / 2.0;
    c.source_spacing = 9;
    c.receiver_spacing = 2;
    c.receiver_count = 12;
    return c;
}

}  // namespace

TEST_CASE("observation generation on the inversion grid is rejected") {
    const ExperimentConfig c = small_cfg();
    const Acquisition acq = c.acquisition();
    Rng rng(1);
    const Scenario sc = sample_scenario(rng, c.lx, c.ly);
    CHECK_THROWS_AS(generate_observation(sc, acq.grid, acq, c.physics()), ConfigError);

    GridSpec not_double = c.fine_grid();
    not_double.nx -= 2;
    CHECK_THROWS_AS(generate_observation(sc, not_double, acq, c.physics()), ConfigError);

    GridSpec wrong_dt = c.fine_grid();
    wrong_dt.dt = c.dt;
    CHECK_THROWS_AS(generate_observation(sc, wrong_dt, acq, c.physics()), ConfigError);
}

TEST_CASE("discretization residual for the homogeneous plate is small but nonzero") {
    // run at the actual desk profile: the bound is a resolution statement
    const ExperimentConfig c = profile_config("desk");
    const Acquisition acq = c.acquisition();
    Scenario empty;  // no damage: gamma == 1 everywhere
    const auto obs = generate_observation(empty, c.fine_grid(), acq, c.physics(), 2);

    MaterialField ones(acq.grid);
    double num = 0.0, den = 0.0;
    for (int s = 0; s < acq.sources.count(); ++s) {
        const SimResult coarse = simulate(ones, c.rho0, c.c0, c.physics().burst,
                                          acq.sources.nodes[s], acq.receivers);
        for (std::size_t i = 0; i < obs[s].samples.size(); ++i) {
            const double d = obs[s].samples[i] - coarse.record.samples[i];
            num += d * d;
            den += coarse.record.samples[i] * coarse.record.samples[i];
        }
    }
    const double rel = std::sqrt(num / den);
    CHECK(rel > 0.0);
    CHECK(rel < 0.2);
}

TEST_CASE("amplitude linearity survives decimation") {
    ExperimentConfig c = small_cfg();
    const Acquisition acq = c.acquisition();
    Rng rng(3);
    const Scenario sc = sample_scenario(rng, c.lx, c.ly);
    const auto obs1 = generate_observation(sc, c.fine_grid(), acq, c.physics(), 2);
    c.a0 *= 2.0;
    const auto obs2 = generate_observation(sc, c.fine_grid(), acq, c.physics(), 2);
    for (std::size_t s = 0; s < obs1.size(); ++s)
        for (std::size_t i = 0; i < obs1[s].samples.size(); ++i)
            CHECK(obs2[s].samples[i] == 2.0 * obs1[s].samples[i]);
}

TEST_CASE("receiver positions map to the nearest fine node") {
    const ExperimentConfig c = small_cfg();
    const GridSpec cg = c.coarse_grid(), fg = c.fine_grid();
    for (const auto& r : c.acquisition().receivers.nodes) {
        const double x = r.ix * cg.dx();
        const int fx = static_cast<int>(std::llround(x / fg.dx()));
        CHECK(std::abs(fx * fg.dx() - x) < fg.dx());
    }
}

#include <doctest.h>

#include <cmath>

#include "fwi/optim.hpp"

using namespace fwi::nn;

TEST_CASE("polynomial decay schedule") {
    LRSchedule s;  // alpha -0.5, beta 0.2
    CHECK(s.factor(0) == 1.0);
    CHECK(s.factor(5) == doctest::Approx(0.7071067811865476).epsilon(1e-5));
    LRSchedule flat{0.0, 0.2};
    CHECK(flat.factor(17) == 1.0);
}

TEST_CASE("global-norm clipping") {
    std::vector<double> g = {3.0, 4.0};  // norm 5
    const double pre = clip_global_norm(g, 1.0);
    CHECK(pre == doctest::Approx(5.0));
    CHECK(std::sqrt(g[0] * g[0] + g[1] * g[1]) <= 1.0 + 1e-12);
    CHECK(g[0] == doctest::Approx(0.6));

    std::vector<double> small = {0.1, 0.1};
    clip_global_norm(small, 1.0);
    CHECK(small[0] == 0.1);  // below threshold: untouched
}

TEST_CASE("adam step: zero gradient is a no-op, one step matches hand values") {
    std::vector<double> p = {1.0, -2.0};
    Adam adam(2, 0.1);
    adam.step(p, {0.0, 0.0});
    CHECK(p[0] == 1.0);
    CHECK(p[1] == -2.0);

    // first nonzero step: mhat/vhat reduce to g/|g|
    Adam fresh(1, 0.1);
    std::vector<double> q = {1.0};
    fresh.step(q, {0.5});
    // m=0.05, v=0.00025, mhat=0.5, vhat=0.25 -> q -= 0.1*0.5/(0.5+1e-8)
    CHECK(q[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));

    // the schedule factor scales the step
    Adam sched(1, 0.1);
    std::vector<double> r = {1.0};
    sched.step(r, {0.5}, 0.5);
    CHECK(r[0] == doctest::Approx(1.0 - 0.05 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
}

TEST_CASE("rmsprop step matches hand values") {
    RMSprop opt(1, 0.1);  // rho 0.99, eps 1e-8
    std::vector<double> p = {1.0};
    opt.step(p, {0.5});
    // sq = 0.01*0.25 = 2.5e-3; step = 0.1*0.5/(0.05+1e-8)
    CHECK(p[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (std::sqrt(2.5e-3) + 1e-8)).epsilon(1e-12));

    RMSprop zero(2, 0.1);
    std::vector<double> q = {3.0, 4.0};
    zero.step(q, {0.0, 0.0});
    CHECK(q[0] == 3.0);
    CHECK(q[1] == 4.0);
}

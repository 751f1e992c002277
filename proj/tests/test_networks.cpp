#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fwi/checkpoint.hpp"
#include "fwi/network.hpp"
#include "test_support.hpp"

using namespace fwi;
using namespace fwi::nn;
using fwi::test::rel_err;

namespace {

struct Row {
    int c, h, w;
    std::size_t params;
};

// Published architecture ledgers, row by row.
const std::vector<Row> kGeneratorRows = {
    {128, 8, 4, 0},      {128, 16, 8, 0},     {128, 16, 8, 147585}, {128, 16, 8, 147585},
    {128, 32, 16, 0},    {64, 32, 16, 73793}, {64, 32, 16, 36929},  {64, 64, 32, 0},
    {64, 64, 32, 36929}, {64, 64, 32, 36929}, {64, 128, 64, 0},     {32, 128, 64, 18465},
    {32, 128, 64, 9249}, {32, 256, 128, 0},   {32, 256, 128, 9249}, {32, 256, 128, 9249},
    {1, 254, 126, 290}};

const std::vector<Row> kUnetRows = {
    {1, 256, 128, 0},      {16, 256, 128, 193},   {16, 256, 128, 2353},  {16, 128, 64, 0},
    {32, 128, 64, 4705},   {32, 128, 64, 9313},   {32, 64, 32, 0},       {64, 64, 32, 18625},
    {64, 64, 32, 37057},   {64, 32, 16, 0},       {128, 32, 16, 74113},  {128, 32, 16, 147841},
    {128, 16, 8, 0},       {128, 16, 8, 147841},  {128, 16, 8, 147841},  {128, 32, 16, 0},
    {64, 32, 16, 110785},  {64, 32, 16, 36929},   {64, 64, 32, 0},       {32, 64, 32, 27745},
    {32, 64, 32, 9249},    {32, 128, 64, 0},      {16, 128, 64, 6961},   {16, 128, 64, 2321},
    {16, 256, 128, 0},     {1, 256, 128, 157},    {1, 256, 128, 10}};

void check_rows(const std::vector<LayerInfo>& table, const std::vector<Row>& expect) {
    REQUIRE(table.size() == expect.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        INFO("row ", i, " (", table[i].label, ")");
        CHECK(table[i].c == expect[i].c);
        CHECK(table[i].h == expect[i].h);
        CHECK(table[i].w == expect[i].w);
        CHECK(table[i].params == expect[i].params);
    }
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("generator parameter count and ledger match the published table") {
    GeneratorNet net = GeneratorNet::paper_arch();
    CHECK(net.param_count() == 526252);
    check_rows(net.layer_table(), kGeneratorRows);
}

TEST_CASE("unet parameter count and ledger match the published table") {
    UNet net = UNet::paper_arch();
    CHECK(net.param_count() == 784039);
    check_rows(net.layer_table(), kUnetRows);
}

TEST_CASE("generator forward shapes match the ledger at full size") {
    GeneratorNet net = GeneratorNet::paper_arch();
    net.init_weights(7);
    const Tensor noise = make_noise_input(128, 8, 4, 9);
    const Tensor y = net.forward(noise, Mode::train);
    CHECK(y.c == 1);
    CHECK(y.h == 256);
    CHECK(y.w == 128);
    const auto& trace = net.shape_trace();
    const auto table = net.layer_table();
    REQUIRE(trace.size() == table.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(trace[i][0] == table[i].c);
        CHECK(trace[i][1] == table[i].h);
        CHECK(trace[i][2] == table[i].w);
    }
    for (double x : y.v) {
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("unet forward shapes match the ledger and output lies in (0,1)") {
    UNet net = UNet::paper_arch();
    net.init_weights(3);
    Rng rng(4);
    Tensor x(1, 1, 256, 128);
    for (auto& v : x.v) v = rng.normal();
    const Tensor y = net.forward(x, Mode::train);
    CHECK(y.c == 1);
    CHECK(y.h == 256);
    CHECK(y.w == 128);
    const auto& trace = net.shape_trace();
    const auto table = net.layer_table();
    REQUIRE(trace.size() == table.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(trace[i][0] == table[i].c);
        CHECK(trace[i][1] == table[i].h);
        CHECK(trace[i][2] == table[i].w);
    }
    for (double v : y.v) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("last-layer initialization gives a near-homogeneous prediction") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GeneratorNet net = GeneratorNet::paper_arch(128, 64);
        net.init_weights(seed);
        const Tensor noise = make_noise_input(128, 4, 2, seed + 100);
        const Tensor y = net.forward(noise, Mode::train);
        const double mean = mean_of(y.v);
        double var = 0.0;
        for (double x : y.v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(y.size());
        CHECK(mean >= 0.90);
        CHECK(mean <= 0.99);
        CHECK(std::sqrt(var) < 0.05);
    }
}

TEST_CASE("same seed reproduces the parameter vector bit for bit") {
    GeneratorNet a = GeneratorNet::paper_arch(64, 32);
    GeneratorNet b = GeneratorNet::paper_arch(64, 32);
    a.init_weights(42);
    b.init_weights(42);
    const auto pa = a.flat_params(), pb = b.flat_params();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);

    GeneratorNet c = GeneratorNet::paper_arch(64, 32);
    c.init_weights(43);
    const auto pc = c.flat_params();
    int diff = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) diff += pa[i] != pc[i];
    CHECK(diff > 1000);
}

TEST_CASE("hidden convolutions carry Glorot-scaled weights") {
    GeneratorNet net = GeneratorNet::paper_arch(64, 32);
    net.init_weights(11);
    const Conv2d& conv = net.levels[0].conv1;  // 128 -> 128, plenty of samples
    double mean = 0.0, var = 0.0;
    for (double x : conv.w) mean += x;
    mean /= static_cast<double>(conv.w.size());
    for (double x : conv.w) var += (x - mean) * (x - mean);
    var /= static_cast<double>(conv.w.size());
    const double expect = 2.0 / (conv.in_ch * 9.0 + conv.out_ch * 9.0);
    CHECK(std::abs(var - expect) <= 0.2 * expect);
}

TEST_CASE("eval-mode forward is bitwise repeatable") {
    UNet net = UNet::paper_arch(64, 32);
    net.init_weights(5);
    Rng rng(6);
    Tensor x(1, 1, 64, 32);
    for (auto& v : x.v) v = rng.normal();
    const Tensor y1 = net.forward(x, Mode::eval);
    const Tensor y2 = net.forward(x, Mode::eval);
    for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1.v[i] == y2.v[i]);
}

TEST_CASE("noise input is seeded and standard normal") {
    const Tensor a = make_noise_input(128, 8, 4, 77);
    const Tensor b = make_noise_input(128, 8, 4, 77);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.v[i] == b.v[i]);
    double mean = 0.0, var = 0.0;
    for (double x : a.v) mean += x;
    mean /= static_cast<double>(a.size());
    for (double x : a.v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(a.size());
    CHECK(std::abs(mean) < 0.1);
    CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("composite miniature networks pass finite-difference checks") {
    Rng rng(21);
    const double h = 1e-6;

    const auto composite_check = [&](Network& net, const Tensor& input, Mode mode) {
        const Tensor y0 = net.forward(input, mode);
        Tensor w(y0.n, y0.c, y0.h, y0.w);
        for (auto& x : w.v) x = rng.normal();
        net.zero_grad();
        net.backward(w);
        const auto grads = net.flat_grads();
        auto params = net.flat_params();
        double gmax = 0.0;
        for (double gval : grads) gmax = std::max(gmax, std::abs(gval));

        const auto loss = [&]() {
            const Tensor y = net.forward(input, mode);
            double s = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) s += w.v[i] * y.v[i];
            return s;
        };
        const std::size_t step = std::max<std::size_t>(1, params.size() / 60);
        for (std::size_t i = 0; i < params.size(); i += step) {
            const double keep = params[i];
            params[i] = keep + h;
            net.set_flat_params(params);
            const double fp = loss();
            params[i] = keep - h;
            net.set_flat_params(params);
            const double fm = loss();
            params[i] = keep;
            net.set_flat_params(params);
            const double fd = (fp - fm) / (2.0 * h);
            // entries far below the dominant scale sit at the FD noise floor
            if (std::abs(grads[i]) < 1e-5 * gmax) continue;
            CHECK(rel_err(grads[i], fd) <= 1e-6);
        }
    };

    // A well-conditioned final layer keeps every gradient path visible to the
    // finite-difference probe; the narrow production init is checked elsewhere.
    const auto widen_final = [&](Network& net, Conv2d& final_conv) {
        auto params = net.flat_params();
        net.set_flat_params(params);
        for (auto& x : final_conv.w) x = 0.5 * rng.normal();
        for (auto& x : final_conv.b) x = 0.2 * rng.normal();
    };

    {
        GeneratorNet mini = GeneratorNet::mini_arch();
        mini.init_weights(31);
        widen_final(mini, mini.final_conv);
        const Tensor noise = make_noise_input(8, 4, 2, 32);
        composite_check(mini, noise, Mode::train);
    }
    {
        UNet mini = UNet::mini_arch();
        mini.init_weights(33);
        widen_final(mini, mini.conv_f2);
        Tensor x(1, 1, 16, 8);
        for (auto& v : x.v) v = rng.normal();
        composite_check(mini, x, Mode::train);
        composite_check(mini, x, Mode::eval);
    }
}

TEST_CASE("checkpoints restore the architecture state") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "fwi_ckpt_tests";
    fs::create_directories(dir);
    const auto path = (dir / "mini.fwic").string();

    UNet net = UNet::mini_arch();
    net.init_weights(9);
    // make running stats nontrivial
    Rng rng(10);
    Tensor x(2, 1, 16, 8);
    for (auto& v : x.v) v = rng.normal();
    net.forward(x, Mode::train);
    write_checkpoint(path, net, {12345, 17});

    UNet other = UNet::mini_arch();
    other.init_weights(1);
    const CheckpointMeta meta = read_checkpoint(path, other);
    CHECK(meta.seed == 12345);
    CHECK(meta.epoch == 17);
    auto sa = net.state(), sb = other.state();
    REQUIRE(sa.size() == sb.size());
    for (std::size_t t = 0; t < sa.size(); ++t)
        for (std::size_t i = 0; i < sa[t].len; ++i)
            CHECK(sb[t].data[i] == static_cast<double>(static_cast<float>(sa[t].data[i])));

    GeneratorNet wrong = GeneratorNet::mini_arch();
    CHECK_THROWS_AS(read_checkpoint(path, wrong), CheckpointMismatch);
}

#include "fwi/inversion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fwi/dataset.hpp"
#include "fwi/parallel.hpp"

namespace fwi {

std::string method_name(Method m) {
    switch (m) {
        case Method::conventional: return "conventional";
        case Method::nn_based: return "nn";
        case Method::conventional_with_init: return "conv_init";
        case Method::transfer: return "transfer";
    }
    return "?";
}

Method method_from_name(const std::string& s) {
    if (s == "conventional") return Method::conventional;
    if (s == "nn") return Method::nn_based;
    if (s == "conv_init") return Method::conventional_with_init;
    if (s == "transfer") return Method::transfer;
    throw ConfigError("unknown method '" + s + "' (conventional|nn|conv_init|transfer)");
}

double mse_to_truth(const MaterialField& pred, const MaterialField& truth) {
    if (!pred.grid.same_mesh(truth.grid)) throw ShapeMismatch("mse_to_truth: grid mismatch");
    return mse_between(pred.values, truth.values);
}

MultiShotEval multi_shot_gradient(const MaterialField& gamma, const Problem& p, int threads) {
    const int ns = p.acq.sources.count();
    if (static_cast<int>(p.obs.size()) != ns)
        throw ShapeMismatch("multi_shot_gradient: one observation per source required");
    std::vector<ShotGradientResult> per_shot(ns);
    parallel_for(ns, threads, [&](int s) {
        per_shot[s] = shot_gradient(gamma, p.physics.rho0, p.physics.c0, p.physics.burst,
                                    p.acq.sources.nodes[s], p.acq.receivers, p.obs[s],
                                    p.physics.allow_unstable);
    });
    MultiShotEval out;
    out.grad = Field2D(gamma.grid.nx, gamma.grid.ny, 0.0);
    for (int s = 0; s < ns; ++s) {
        out.cost_raw += per_shot[s].cost;
        for (std::size_t i = 0; i < out.grad.size(); ++i)
            out.grad.v[i] += per_shot[s].grad.v[i];
        out.traces.push_back(std::move(per_shot[s].traces));
    }
    return out;
}

GradientField first_iteration_gradient(const Problem& p, int threads) {
    MaterialField ones(p.acq.grid, kBackgroundGamma);
    MultiShotEval ev = multi_shot_gradient(ones, p, threads);
    return GradientField{p.acq.grid, std::move(ev.grad)};
}

MaterialField tensor_to_field(const nn::Tensor& t, const GridSpec& grid) {
    t.require_shape(1, 1, grid.nx, grid.ny, "tensor_to_field: tensor must be 1x1xnx xny");
    MaterialField f(grid);
    f.values.v = t.v;  // identical layout: h == ix, w == iy
    return f;
}

nn::Tensor field_to_tensor(const Field2D& f) {
    nn::Tensor t(1, 1, f.nx, f.ny);
    t.v = f.v;
    return t;
}

NnPipelineEval nn_pipeline_eval(const Problem& p, nn::Network& net, const nn::Tensor& input,
                                nn::Mode mode, double cost_scale, int threads) {
    NnPipelineEval out;
    const nn::Tensor pred = net.forward(input, mode);
    out.gamma = tensor_to_field(pred, p.acq.grid);
    MultiShotEval ev = multi_shot_gradient(out.gamma, p, threads);
    out.cost_raw = ev.cost_raw;
    out.cost_scaled = cost_scale * ev.cost_raw;
    nn::Tensor upstream(1, 1, p.acq.grid.nx, p.acq.grid.ny);
    for (std::size_t i = 0; i < upstream.size(); ++i) upstream.v[i] = cost_scale * ev.grad.v[i];
    net.zero_grad();
    net.backward(upstream);
    out.theta_grad = net.flat_grads();
    return out;
}

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void maybe_snapshot(InversionRun& run, const InversionConfig& cfg, int after_updates,
                    const Field2D& field) {
    if (std::find(cfg.snapshot_iters.begin(), cfg.snapshot_iters.end(), after_updates) !=
        cfg.snapshot_iters.end())
        run.snapshots.emplace_back(after_updates, field);
}

IterationMetrics make_row(const InversionConfig& cfg, int iter, double cost_raw,
                          const MaterialField& gamma, const Problem& p, double t0) {
    IterationMetrics row;
    row.iteration = iter;
    row.cost_raw = cost_raw;
    row.cost_scaled = cfg.cost_scale * cost_raw;
    if (p.truth) row.mse = mse_between(gamma.values, *p.truth);
    row.wall_ms = cfg.deterministic ? 0.0 : now_ms() - t0;
    return row;
}

InversionRun conventional_loop(const Problem& p, const InversionConfig& cfg,
                               const MaterialField& init) {
    if (!init.grid.same_mesh(p.acq.grid)) throw ShapeMismatch("inversion: init grid mismatch");
    if (cfg.iters < 1 || !(cfg.lr > 0.0)) throw ConfigError("inversion: bad iteration budget or lr");
    InversionRun run;
    MaterialField gamma = init;
    for (auto& g : gamma.values.v) g = std::clamp(g, kGammaClampLo, kGammaClampHi);
    maybe_snapshot(run, cfg, 0, gamma.values);

    nn::Adam adam(gamma.values.size(), cfg.lr);
    std::vector<double> params = gamma.values.v;
    for (int iter = 1; iter <= cfg.iters; ++iter) {
        const double t0 = now_ms();
        MultiShotEval ev = multi_shot_gradient(gamma, p, cfg.threads);
        run.metrics.push_back(make_row(cfg, iter, ev.cost_raw, gamma, p, t0));
        std::vector<double> grads(ev.grad.v);
        for (auto& g : grads) g *= cfg.cost_scale;
        nn::clip_global_norm(grads, cfg.clip);
        adam.step(params, grads, cfg.sched.factor(iter - 1));
        for (std::size_t i = 0; i < params.size(); ++i)
            params[i] = std::clamp(params[i], kGammaClampLo, kGammaClampHi);
        gamma.values.v = params;
        maybe_snapshot(run, cfg, iter, gamma.values);
    }
    run.final_field = std::move(gamma);
    return run;
}

InversionRun network_loop(const Problem& p, const InversionConfig& cfg, nn::Network& net,
                          const nn::Tensor& input, nn::Mode mode) {
    if (cfg.iters < 1 || !(cfg.lr > 0.0)) throw ConfigError("inversion: bad iteration budget or lr");
    InversionRun run;
    std::vector<double> params = net.flat_params();
    nn::Adam adam(params.size(), cfg.lr);
    {
        const nn::Tensor first = net.forward(input, mode);
        maybe_snapshot(run, cfg, 0, tensor_to_field(first, p.acq.grid).values);
    }
    for (int iter = 1; iter <= cfg.iters; ++iter) {
        const double t0 = now_ms();
        NnPipelineEval ev = nn_pipeline_eval(p, net, input, mode, cfg.cost_scale, cfg.threads);
        run.metrics.push_back(make_row(cfg, iter, ev.cost_raw, ev.gamma, p, t0));
        nn::clip_global_norm(ev.theta_grad, cfg.clip);
        adam.step(params, ev.theta_grad, cfg.sched.factor(iter - 1));
        net.set_flat_params(params);
        if (std::find(cfg.snapshot_iters.begin(), cfg.snapshot_iters.end(), iter) !=
            cfg.snapshot_iters.end()) {
            const nn::Tensor snap = net.forward(input, mode);
            run.snapshots.emplace_back(iter, tensor_to_field(snap, p.acq.grid).values);
        }
    }
    const nn::Tensor last = net.forward(input, mode);
    run.final_field = tensor_to_field(last, p.acq.grid);
    return run;
}

nn::Tensor normalized_gradient_input(const Problem& p, const InversionConfig& cfg) {
    GradientField g0 = first_iteration_gradient(p, cfg.threads);
    normalize_max_abs(g0.values);
    return field_to_tensor(g0.values);
}

}  // namespace

InversionRun run_conventional(const Problem& p, const InversionConfig& cfg,
                              const MaterialField& init) {
    return conventional_loop(p, cfg, init);
}

InversionRun run_nn_based(const Problem& p, const InversionConfig& cfg) {
    const GridSpec& g = p.acq.grid;
    nn::GeneratorNet net = nn::GeneratorNet::paper_arch(g.nx, g.ny);
    net.init_weights(cfg.seed);
    const auto in_shape = net.input_shape();
    const nn::Tensor noise =
        nn::make_noise_input(in_shape[0], in_shape[1], in_shape[2], Rng::mix(cfg.seed, 0x6b));
    return network_loop(p, cfg, net, noise, nn::Mode::train);
}

InversionRun run_transfer(const Problem& p, nn::UNet& net, const InversionConfig& cfg) {
    const auto in_shape = net.input_shape();
    if (in_shape[1] != p.acq.grid.nx || in_shape[2] != p.acq.grid.ny)
        throw CheckpointMismatch("run_transfer: U-Net size does not match the inversion grid");
    const nn::Tensor g0 = normalized_gradient_input(p, cfg);
    return network_loop(p, cfg, net, g0, nn::Mode::eval);
}

InversionRun run_conventional_with_init(const Problem& p, nn::UNet& net,
                                        const InversionConfig& cfg) {
    const auto in_shape = net.input_shape();
    if (in_shape[1] != p.acq.grid.nx || in_shape[2] != p.acq.grid.ny)
        throw CheckpointMismatch("run_conventional_with_init: U-Net size mismatch");
    const nn::Tensor g0 = normalized_gradient_input(p, cfg);
    const nn::Tensor pred = net.forward(g0, nn::Mode::eval);
    return conventional_loop(p, cfg, tensor_to_field(pred, p.acq.grid));
}

}  // namespace fwi

#include "fwi/pretrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fwi {

namespace {

nn::Tensor gather_batch(const Dataset& ds, const std::vector<int>& idx, bool target) {
    nn::Tensor t(static_cast<int>(idx.size()), 1, ds.nx, ds.ny);
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const Field2D& f = target ? ds.records[idx[b]].target : ds.records[idx[b]].input;
        std::copy(f.v.begin(), f.v.end(), t.v.begin() + b * f.size());
    }
    return t;
}

}  // namespace

double batch_mse(const nn::Tensor& pred, const nn::Tensor& target) {
    if (!pred.same_shape(target)) throw ShapeMismatch("batch_mse: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.v[i] - target.v[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

TrainResult train_unet(nn::UNet& net, const Dataset& ds, const TrainConfig& cfg,
                       const std::function<void(const BatchProbe&)>& probe) {
    const int n = static_cast<int>(ds.records.size());
    if (n < 1) throw ConfigError("train_unet: empty dataset");
    const auto ishape = net.input_shape();
    if (ishape[1] != ds.nx || ishape[2] != ds.ny)
        throw ShapeMismatch("train_unet: dataset shape does not match network input");
    if (cfg.epochs < 0) throw ConfigError("train_unet: negative epochs");
    const int batch = cfg.batch > 0 ? cfg.batch : std::max(1, n / 10);
    if (batch > n) throw ConfigError("train_unet: batch larger than dataset");

    net.init_weights(cfg.seed);

    TrainResult res;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(Rng::mix(cfg.seed, 0x5641u));
    split_rng.shuffle(order);
    const int n_val = static_cast<int>(std::lround(cfg.val_fraction * n));
    res.val_indices.assign(order.begin(), order.begin() + n_val);
    res.train_indices.assign(order.begin() + n_val, order.end());
    if (res.train_indices.empty()) throw ConfigError("train_unet: no training samples left");

    std::vector<double> params = net.flat_params();
    nn::RMSprop opt(params.size(), cfg.lr);
    Rng epoch_rng(Rng::mix(cfg.seed, 0xe70c5u));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<int> idx = res.train_indices;
        epoch_rng.shuffle(idx);
        const double lr_factor = cfg.sched.factor(epoch);
        double loss_sum = 0.0;
        for (std::size_t off = 0; off < idx.size(); off += batch) {
            const std::vector<int> bidx(idx.begin() + off,
                                        idx.begin() + std::min(idx.size(), off + batch));
            const nn::Tensor x = gather_batch(ds, bidx, false);
            const nn::Tensor t = gather_batch(ds, bidx, true);
            const nn::Tensor y = net.forward(x, nn::Mode::train);
            const double loss = batch_mse(y, t);
            loss_sum += loss * static_cast<double>(bidx.size());

            nn::Tensor dy(y.n, y.c, y.h, y.w);
            const double k = 2.0 / static_cast<double>(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) dy.v[i] = k * (y.v[i] - t.v[i]);
            net.zero_grad();
            net.backward(dy);
            std::vector<double> grads = net.flat_grads();
            nn::clip_global_norm(grads, cfg.clip);
            opt.step(params, grads, lr_factor);
            net.set_flat_params(params);

            if (probe) probe({epoch, loss, bidx, y});
        }
        EpochLog log;
        log.epoch = epoch;
        log.train_mse = loss_sum / static_cast<double>(idx.size());
        log.lr_factor = lr_factor;
        if (!res.val_indices.empty()) {
            const nn::Tensor xv = gather_batch(ds, res.val_indices, false);
            const nn::Tensor tv = gather_batch(ds, res.val_indices, true);
            const nn::Tensor yv = net.forward(xv, nn::Mode::eval);
            log.val_mse = batch_mse(yv, tv);
        }
        res.log.push_back(log);
    }
    return res;
}

MaterialField predict_initial(nn::UNet& net, const GridSpec& grid, const Field2D& g0,
                              std::uint8_t norm_id) {
    if (norm_id != kNormMaxAbs)
        throw NormalizationMismatch("predict_initial: unsupported normalization id");
    const auto ishape = net.input_shape();
    if (ishape[1] != grid.nx || ishape[2] != grid.ny || g0.nx != grid.nx || g0.ny != grid.ny)
        throw CheckpointMismatch("predict_initial: grid/network shape mismatch");
    Field2D norm = g0;
    normalize_max_abs(norm);
    nn::Tensor x(1, 1, grid.nx, grid.ny);
    x.v = norm.v;
    const nn::Tensor y = net.forward(x, nn::Mode::eval);
    MaterialField out(grid);
    out.values.v = y.v;
    return out;
}

}  // namespace fwi

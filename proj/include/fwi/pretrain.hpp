#pragma once

#include <functional>

#include "fwi/dataset.hpp"
#include "fwi/network.hpp"
#include "fwi/optim.hpp"

namespace fwi {

struct TrainConfig {
    int epochs = 100;
    int batch = 0;  // 0 = dataset size / 10 (at least 1)
    double lr = 8e-4;
    double clip = 5e-5;
    nn::LRSchedule sched;
    double val_fraction = 0.1;
    std::uint64_t seed = 1;
};

struct EpochLog {
    int epoch = 0;
    double train_mse = -1.0;
    double val_mse = -1.0;
    double lr_factor = 1.0;
};

/// Loss and predictions of one training batch, surfaced for logging and for
/// the loss-recomputation check.
struct BatchProbe {
    int epoch = 0;
    double loss = 0.0;
    std::vector<int> indices;
    nn::Tensor predictions;
};

struct TrainResult {
    std::vector<EpochLog> log;
    std::vector<int> train_indices;
    std::vector<int> val_indices;
};

/// Supervised training of the U-Net on (gradient, truth) pairs with RMSprop,
/// seeded shuffling and no early stopping. The loss is the batch mean of the
/// per-sample pixel-mean squared error. Initializes the network, including the
/// last-layer trick.
TrainResult train_unet(nn::UNet& net, const Dataset& ds, const TrainConfig& cfg,
                       const std::function<void(const BatchProbe&)>& probe = nullptr);

/// Eval-mode prediction from a normalized first-iteration gradient.
MaterialField predict_initial(nn::UNet& net, const GridSpec& grid, const Field2D& g0,
                              std::uint8_t norm_id = kNormMaxAbs);

/// Pixel-mean MSE between a prediction batch and targets (the training loss).
double batch_mse(const nn::Tensor& pred, const nn::Tensor& target);

}  // namespace fwi

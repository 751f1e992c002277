#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "fwi/inversion.hpp"
#include "fwi/physics.hpp"
#include "fwi/pretrain.hpp"

namespace fwi {

/// Flat key=value experiment configuration. Profiles provide complete
/// defaults; a config file overrides individual keys. Unknown keys are
/// rejected.
struct ExperimentConfig {
    // physics
    double rho0 = 2700.0;
    double c0 = 6000.0;
    double kc = 5e5;
    double nc = 2.0;
    double a0 = 1.0;
    // inversion grid
    int nx = 0, ny = 0, nt = 0;
    double dt = 0.0;
    double lx = 0.1, ly = 0.05;
    // reference (observation) grid
    int fine_nx = 0, fine_ny = 0, fine_nt = 0;
    double fine_dt = 0.0;
    // acquisition layout
    int source_count = 4, source_spacing = 0;
    int receiver_count = 24, receiver_spacing = 0;
    // per-method hyperparameters
    double lr_conventional = 8e-2, lr_nn = 5e-4, lr_conv_init = 5e-2, lr_transfer = 5e-4;
    double clip_conventional = 1e-5, clip_nn = 5e-5, clip_conv_init = 1e-5, clip_transfer = 1e-5;
    double scale_conventional = 1e12, scale_nn = 1e8, scale_conv_init = 1e12,
           scale_transfer = 1e10;
    double sched_alpha = -0.5, sched_beta = 0.2;
    // pretraining
    double pretrain_lr = 8e-4, pretrain_clip = 5e-5;
    int pretrain_epochs = 100, pretrain_batch = 0;
    double pretrain_val_fraction = 0.1;
    // misc
    std::uint64_t seed = 1;
    bool allow_unstable = false;
    std::string out_dir = "out";

    GridSpec coarse_grid() const;
    GridSpec fine_grid() const;
    Acquisition acquisition() const;
    Physics physics() const;
    InversionConfig inversion_config(Method m) const;
    TrainConfig train_config() const;
    void validate() const;
};

/// `desk` is the fast stable profile; `paper` uses the published grid sizes
/// with the time step reduced to a stable Courant number.
ExperimentConfig profile_config(const std::string& name);

ExperimentConfig parse_config_text(const std::string& text, const ExperimentConfig& base);
ExperimentConfig load_config_file(const std::string& path, const ExperimentConfig& base);
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace fwi

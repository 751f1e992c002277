#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fwi/adjoint.hpp"
#include "fwi/network.hpp"
#include "fwi/optim.hpp"
#include "fwi/physics.hpp"

namespace fwi {

enum class Method { conventional, nn_based, conventional_with_init, transfer };

std::string method_name(Method m);
Method method_from_name(const std::string& s);

struct InversionConfig {
    Method method = Method::conventional;
    double lr = 8e-2;
    double clip = 1e-5;
    double cost_scale = 1e12;
    int iters = 35;
    std::uint64_t seed = 1;
    nn::LRSchedule sched;
    bool deterministic = false;
    int threads = 1;
    std::vector<int> snapshot_iters;  // states after that many updates; 0 = initial
};

struct IterationMetrics {
    int iteration = 0;        // 1-based; row i describes the state entering iteration i
    double cost_scaled = 0.0;
    double cost_raw = 0.0;
    double mse = -1.0;        // vs truth when available
    double wall_ms = 0.0;
};

struct InversionRun {
    std::vector<IterationMetrics> metrics;
    std::vector<std::pair<int, Field2D>> snapshots;
    MaterialField final_field;
};

/// One inverse problem: physics, acquisition and observed traces; truth is
/// carried for error reporting only.
struct Problem {
    Physics physics;
    Acquisition acq;
    std::vector<ShotRecord> obs;
    std::optional<Field2D> truth;
};

double mse_to_truth(const MaterialField& pred, const MaterialField& truth);

/// Misfit and raw material gradient over all shots (fixed summation order).
struct MultiShotEval {
    double cost_raw = 0.0;
    Field2D grad;
    std::vector<ShotRecord> traces;
};
MultiShotEval multi_shot_gradient(const MaterialField& gamma, const Problem& p, int threads);

/// Adjoint gradient at the homogeneous model gamma == 1: both the U-Net input
/// and the pretraining input feature.
GradientField first_iteration_gradient(const Problem& p, int threads = 1);

/// Full chain-rule evaluation for network-parameterized gamma: cost, raw
/// gamma-gradient and the resulting parameter gradient at the given input.
struct NnPipelineEval {
    double cost_raw = 0.0;
    double cost_scaled = 0.0;
    MaterialField gamma;
    std::vector<double> theta_grad;
};
NnPipelineEval nn_pipeline_eval(const Problem& p, nn::Network& net, const nn::Tensor& input,
                                nn::Mode mode, double cost_scale, int threads);

MaterialField tensor_to_field(const nn::Tensor& t, const GridSpec& grid);
nn::Tensor field_to_tensor(const Field2D& f);

InversionRun run_conventional(const Problem& p, const InversionConfig& cfg,
                              const MaterialField& init);
InversionRun run_nn_based(const Problem& p, const InversionConfig& cfg);
/// `net` carries the pretrained parameters; batch norm stays in eval mode.
InversionRun run_transfer(const Problem& p, nn::UNet& net, const InversionConfig& cfg);
InversionRun run_conventional_with_init(const Problem& p, nn::UNet& net,
                                        const InversionConfig& cfg);

/// Gamma range for conventional updates.
constexpr double kGammaClampLo = 1e-5;
constexpr double kGammaClampHi = 2.0;

}  // namespace fwi

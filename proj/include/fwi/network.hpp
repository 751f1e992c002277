#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "fwi/layers.hpp"
#include "fwi/rng.hpp"

namespace fwi {
namespace nn {

/// One row of the architecture ledger: layer label, activation shape after the
/// layer (c, h, w), learnable parameter count.
struct LayerInfo {
    std::string label;
    int c = 0, h = 0, w = 0;
    std::size_t params = 0;
};

/// One named state tensor (parameters or running statistics).
struct StateTensor {
    std::string name;
    double* data = nullptr;
    double* grad = nullptr;  // null for non-learnable state
    std::size_t len = 0;
    std::vector<int> dims;
    bool learnable = true;
};

class Network {
public:
    virtual ~Network() = default;

    virtual Tensor forward(const Tensor& x, Mode mode) = 0;
    /// Accumulates parameter gradients for the last forward pass and returns
    /// the gradient with respect to the network input.
    virtual Tensor backward(const Tensor& dy) = 0;

    virtual std::vector<StateTensor> state() = 0;
    virtual std::vector<LayerInfo> layer_table() const = 0;
    virtual std::array<int, 3> input_shape() const = 0;  // (c, h, w)

    /// Shapes observed after each ledger row during the last forward pass.
    const std::vector<std::array<int, 3>>& shape_trace() const { return shape_trace_; }

    std::size_t param_count();
    void zero_grad();
    std::vector<double> flat_params();
    std::vector<double> flat_grads();
    void set_flat_params(const std::vector<double>& p);

    /// Glorot init everywhere, then the last-layer trick: final conv weights
    /// from N(0, 0.01^2) and its bias set to 3.
    void init_weights(std::uint64_t seed);

protected:
    virtual Conv2d& final_conv_layer() = 0;
    std::vector<std::array<int, 3>> shape_trace_;
};

struct GenLevel {
    UpsampleNearest2 up;
    Conv2d conv1;
    PReLU act1;
    Conv2d conv2;
    PReLU act2;
};

/// Upsampling generator: noise tensor in, density scaling field out.
/// The unpadded final convolution shrinks the map by one pixel per edge;
/// replication padding restores the declared output size.
class GeneratorNet : public Network {
public:
    /// plan[i] = channels of the two convolutions at level i.
    GeneratorNet(int out_h, int out_w, int in_ch, std::vector<std::array<int, 2>> plan);

    static GeneratorNet paper_arch(int out_h = 256, int out_w = 128);
    static GeneratorNet mini_arch(int out_h = 16, int out_w = 8);

    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;
    std::vector<StateTensor> state() override;
    std::vector<LayerInfo> layer_table() const override;
    std::array<int, 3> input_shape() const override { return {in_ch, base_h, base_w}; }

    int in_ch, base_h, base_w, out_h, out_w;
    std::vector<GenLevel> levels;
    Conv2d final_conv;  // pad 0
    AdaptiveSigmoid final_act;
    ReplicationPad1 final_pad;

protected:
    Conv2d& final_conv_layer() override { return final_conv; }
};

struct ConvBNAct {
    Conv2d conv;
    BatchNorm2d bn;
    PReLU act;
};

struct ConvAct {
    Conv2d conv;
    PReLU act;
};

struct UNetEnc {
    ConvBNAct c1, c2;
    MaxPool2 pool;
};

struct UNetDec {
    UpsampleNearest2 up;
    ConvBNAct c1;
    ConvAct c2;  // no batch norm on the second decoder conv
};

/// U-Net regressor mapping a first-iteration adjoint gradient image to the
/// density scaling field. Skip connections tap the input and each pooled
/// encoder output.
class UNet : public Network {
public:
    UNet(int in_h, int in_w, int in_ch, std::vector<int> widths);

    static UNet paper_arch(int in_h = 256, int in_w = 128);
    static UNet mini_arch(int in_h = 16, int in_w = 8);

    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;
    std::vector<StateTensor> state() override;
    std::vector<LayerInfo> layer_table() const override;
    std::array<int, 3> input_shape() const override { return {in_ch, in_h, in_w}; }

    int in_ch, in_h, in_w;
    std::vector<int> widths;
    std::vector<UNetEnc> enc;
    ConvBNAct b1, b2;
    std::vector<UNetDec> dec;
    UpsampleNearest2 up_f;
    ConvBNAct cf1;
    Conv2d conv_f2;
    Sigmoid sig_f;

protected:
    Conv2d& final_conv_layer() override { return conv_f2; }

private:
    std::vector<Tensor> skip_cache_;
};

/// Fixed noise input for the generator, standard normal entries.
Tensor make_noise_input(int c, int h, int w, std::uint64_t seed);

}  // namespace nn
}  // namespace fwi

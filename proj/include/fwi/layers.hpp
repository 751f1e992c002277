#pragma once

#include <vector>

#include "fwi/tensor.hpp"

namespace fwi {
namespace nn {

enum class Mode { train, eval };

/// 3x3 convolution, stride 1, padding `pad` (1 keeps the shape, 0 shrinks by 2).
struct Conv2d {
    int in_ch = 0, out_ch = 0, pad = 1;
    std::vector<double> w, b;    // w laid out (oc, ic, kh, kw)
    std::vector<double> gw, gb;

    Conv2d() = default;
    Conv2d(int in_c, int out_c, int pad_)
        : in_ch(in_c), out_ch(out_c), pad(pad_),
          w(static_cast<std::size_t>(out_c) * in_c * 9, 0.0), b(out_c, 0.0),
          gw(w.size(), 0.0), gb(out_c, 0.0) {}

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    std::size_t param_count() const { return w.size() + b.size(); }

    Tensor x_cache;
};

/// Spatial batch normalization with affine parameters and running statistics.
struct BatchNorm2d {
    int ch = 0;
    double eps = 1e-5, momentum = 0.1;
    std::vector<double> gamma, beta, ggamma, gbeta;
    std::vector<double> run_mean, run_var;

    BatchNorm2d() = default;
    explicit BatchNorm2d(int ch_)
        : ch(ch_), gamma(ch_, 1.0), beta(ch_, 0.0), ggamma(ch_, 0.0), gbeta(ch_, 0.0),
          run_mean(ch_, 0.0), run_var(ch_, 1.0) {}

    Tensor forward(const Tensor& x, Mode mode);
    Tensor backward(const Tensor& dy);
    std::size_t param_count() const { return 2 * static_cast<std::size_t>(ch); }

    Tensor x_cache;
    std::vector<double> mean_c, var_c;
    Mode mode_c = Mode::train;
};

/// PReLU with one shared learnable slope.
struct PReLU {
    double a = 0.25;
    double ga = 0.0;

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    Tensor x_cache;
};

struct MaxPool2 {
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    std::vector<std::size_t> argmax_cache;  // absolute input offsets
    int xn = 0, xc = 0, xh = 0, xw = 0;
};

struct UpsampleNearest2 {
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    int xn = 0, xc = 0, xh = 0, xw = 0;
};

struct Sigmoid {
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    Tensor y_cache;
};

/// sigmoid(a*x) with a single learnable steepness a.
struct AdaptiveSigmoid {
    double a = 1.0;
    double ga = 0.0;

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    Tensor x_cache, y_cache;
};

/// 1-pixel replication padding on both spatial axes.
struct ReplicationPad1 {
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    int xn = 0, xc = 0, xh = 0, xw = 0;
};

}  // namespace nn
}  // namespace fwi

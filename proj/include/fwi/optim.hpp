#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fwi/errors.hpp"

namespace fwi {
namespace nn {

/// Polynomial decay factor (beta*epoch + 1)^alpha; factor(0) == 1.
struct LRSchedule {
    double alpha = -0.5;
    double beta = 0.2;
    double factor(int epoch) const { return std::pow(beta * epoch + 1.0, alpha); }
};

/// Scales g so its global L2 norm does not exceed threshold.
/// Returns the pre-clip norm.
double clip_global_norm(std::vector<double>& g, double threshold);

class Adam {
public:
    Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grads,
              double lr_factor = 1.0);

    double lr() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

class RMSprop {
public:
    RMSprop(std::size_t n, double lr, double rho = 0.99, double eps = 1e-8)
        : lr_(lr), rho_(rho), eps_(eps), sq_(n, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grads,
              double lr_factor = 1.0);

    double lr() const { return lr_; }

private:
    double lr_, rho_, eps_;
    std::vector<double> sq_;
};

}  // namespace nn
}  // namespace fwi

#include "fwi/optim.hpp"

namespace fwi {
namespace nn {

double clip_global_norm(std::vector<double>& g, double threshold) {
    double sq = 0.0;
    for (double x : g) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm > threshold && norm > 0.0) {
        const double s = threshold / norm;
        for (double& x : g) x *= s;
    }
    return norm;
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads, double lr_factor) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw ShapeMismatch("Adam::step: size mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const double a = lr_ * lr_factor;
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        params[i] -= a * mhat / (std::sqrt(vhat) + eps_);
    }
}

void RMSprop::step(std::vector<double>& params, const std::vector<double>& grads,
                   double lr_factor) {
    if (params.size() != sq_.size() || grads.size() != sq_.size())
        throw ShapeMismatch("RMSprop::step: size mismatch");
    const double a = lr_ * lr_factor;
    for (std::size_t i = 0; i < params.size(); ++i) {
        sq_[i] = rho_ * sq_[i] + (1.0 - rho_) * grads[i] * grads[i];
        params[i] -= a * grads[i] / (std::sqrt(sq_[i]) + eps_);
    }
}

}  // namespace nn
}  // namespace fwi

#pragma once

#include <cstddef>
#include <vector>

#include "fwi/errors.hpp"

namespace fwi {
namespace nn {

/// Dense NCHW tensor of doubles.
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_, double fill = 0.0)
        : n(n_), c(c_), h(h_), w(w_),
          v(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

    std::size_t size() const { return v.size(); }
    std::size_t plane() const { return static_cast<std::size_t>(h) * w; }

    double* slab(int in, int ic) { return v.data() + (static_cast<std::size_t>(in) * c + ic) * plane(); }
    const double* slab(int in, int ic) const {
        return v.data() + (static_cast<std::size_t>(in) * c + ic) * plane();
    }

    double& at(int in, int ic, int ih, int iw) { return slab(in, ic)[static_cast<std::size_t>(ih) * w + iw]; }
    double at(int in, int ic, int ih, int iw) const {
        return slab(in, ic)[static_cast<std::size_t>(ih) * w + iw];
    }

    bool same_shape(const Tensor& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    void require_shape(int n_, int c_, int h_, int w_, const char* who) const {
        if (n != n_ || c != c_ || h != h_ || w != w_) throw ShapeMismatch(who);
    }
};

Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& dy, Tensor& da, Tensor& db);

}  // namespace nn
}  // namespace fwi

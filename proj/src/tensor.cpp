#include "fwi/tensor.hpp"

#include <cstring>

namespace fwi {
namespace nn {

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    if (a.n != b.n || a.h != b.h || a.w != b.w)
        throw ShapeMismatch("concat_channels: spatial/batch shape mismatch");
    Tensor y(a.n, a.c + b.c, a.h, a.w);
    const std::size_t plane = a.plane();
    for (int in = 0; in < a.n; ++in) {
        std::memcpy(y.slab(in, 0), a.slab(in, 0), sizeof(double) * plane * a.c);
        std::memcpy(y.slab(in, a.c), b.slab(in, 0), sizeof(double) * plane * b.c);
    }
    return y;
}

void split_channels(const Tensor& dy, Tensor& da, Tensor& db) {
    if (dy.c != da.c + db.c || dy.n != da.n || dy.h != da.h || dy.w != da.w)
        throw ShapeMismatch("split_channels: shape mismatch");
    const std::size_t plane = dy.plane();
    for (int in = 0; in < dy.n; ++in) {
        std::memcpy(da.slab(in, 0), dy.slab(in, 0), sizeof(double) * plane * da.c);
        std::memcpy(db.slab(in, 0), dy.slab(in, da.c), sizeof(double) * plane * db.c);
    }
}

}  // namespace nn
}  // namespace fwi

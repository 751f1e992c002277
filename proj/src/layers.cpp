#include "fwi/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace fwi {
namespace nn {

Tensor Conv2d::forward(const Tensor& x) {
    if (x.c != in_ch) throw ShapeMismatch("Conv2d: input channel mismatch");
    const int H = x.h, W = x.w;
    const int OH = H + 2 * pad - 2, OW = W + 2 * pad - 2;
    if (OH <= 0 || OW <= 0) throw ShapeMismatch("Conv2d: input too small");
    x_cache = x;
    Tensor y(x.n, out_ch, OH, OW);

    const int jobs = x.n * out_ch;
#pragma omp parallel for schedule(static)
    for (int job = 0; job < jobs; ++job) {
        const int n = job / out_ch, oc = job % out_ch;
        double* y0 = y.slab(n, oc);
        std::fill(y0, y0 + y.plane(), b[oc]);
        for (int ic = 0; ic < in_ch; ++ic) {
            const double* x0 = x.slab(n, ic);
            const double* wk = w.data() + (static_cast<std::size_t>(oc) * in_ch + ic) * 9;
            for (int kh = 0; kh < 3; ++kh) {
                const int oh_lo = std::max(0, pad - kh), oh_hi = std::min(OH, H + pad - kh);
                for (int kw = 0; kw < 3; ++kw) {
                    const double wv = wk[kh * 3 + kw];
                    const int ow_lo = std::max(0, pad - kw), ow_hi = std::min(OW, W + pad - kw);
                    const int len = ow_hi - ow_lo;
                    for (int oh = oh_lo; oh < oh_hi; ++oh) {
                        double* yr = y0 + static_cast<std::size_t>(oh) * OW + ow_lo;
                        const double* xr = x0 + static_cast<std::size_t>(oh + kh - pad) * W +
                                           ow_lo + kw - pad;
#pragma omp simd
                        for (int t = 0; t < len; ++t) yr[t] += wv * xr[t];
                    }
                }
            }
        }
    }
    return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
    const Tensor& x = x_cache;
    const int H = x.h, W = x.w;
    const int OH = H + 2 * pad - 2, OW = W + 2 * pad - 2;
    dy.require_shape(x.n, out_ch, OH, OW, "Conv2d::backward upstream shape");

    // Parameter gradients: each (oc) owned by one thread.
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < out_ch; ++oc) {
        double db = 0.0;
        for (int n = 0; n < x.n; ++n) {
            const double* d0 = dy.slab(n, oc);
            for (std::size_t i = 0; i < dy.plane(); ++i) db += d0[i];
        }
        gb[oc] += db;
        for (int ic = 0; ic < in_ch; ++ic) {
            double* gwk = gw.data() + (static_cast<std::size_t>(oc) * in_ch + ic) * 9;
            for (int kh = 0; kh < 3; ++kh) {
                const int oh_lo = std::max(0, pad - kh), oh_hi = std::min(OH, H + pad - kh);
                for (int kw = 0; kw < 3; ++kw) {
                    const int ow_lo = std::max(0, pad - kw), ow_hi = std::min(OW, W + pad - kw);
                    const int len = ow_hi - ow_lo;
                    double acc = 0.0;
                    for (int n = 0; n < x.n; ++n) {
                        const double* d0 = dy.slab(n, oc);
                        const double* x0 = x.slab(n, ic);
                        for (int oh = oh_lo; oh < oh_hi; ++oh) {
                            const double* dr = d0 + static_cast<std::size_t>(oh) * OW + ow_lo;
                            const double* xr = x0 + static_cast<std::size_t>(oh + kh - pad) * W +
                                               ow_lo + kw - pad;
                            double s = 0.0;
#pragma omp simd reduction(+ : s)
                            for (int t = 0; t < len; ++t) s += dr[t] * xr[t];
                            acc += s;
                        }
                    }
                    gwk[kh * 3 + kw] += acc;
                }
            }
        }
    }

    // Input gradient: each (n, ic) slab owned by one thread.
    Tensor dx(x.n, in_ch, H, W);
    const int jobs = x.n * in_ch;
#pragma omp parallel for schedule(static)
    for (int job = 0; job < jobs; ++job) {
        const int n = job / in_ch, ic = job % in_ch;
        double* dx0 = dx.slab(n, ic);
        for (int oc = 0; oc < out_ch; ++oc) {
            const double* d0 = dy.slab(n, oc);
            const double* wk = w.data() + (static_cast<std::size_t>(oc) * in_ch + ic) * 9;
            for (int kh = 0; kh < 3; ++kh) {
                const int oh_lo = std::max(0, pad - kh), oh_hi = std::min(OH, H + pad - kh);
                for (int kw = 0; kw < 3; ++kw) {
                    const double wv = wk[kh * 3 + kw];
                    const int ow_lo = std::max(0, pad - kw), ow_hi = std::min(OW, W + pad - kw);
                    const int len = ow_hi - ow_lo;
                    for (int oh = oh_lo; oh < oh_hi; ++oh) {
                        const double* dr = d0 + static_cast<std::size_t>(oh) * OW + ow_lo;
                        double* xr = dx0 + static_cast<std::size_t>(oh + kh - pad) * W +
                                     ow_lo + kw - pad;
#pragma omp simd
                        for (int t = 0; t < len; ++t) xr[t] += wv * dr[t];
                    }
                }
            }
        }
    }
    return dx;
}

Tensor BatchNorm2d::forward(const Tensor& x, Mode mode) {
    if (x.c != ch) throw ShapeMismatch("BatchNorm2d: channel mismatch");
    x_cache = x;
    mode_c = mode;
    Tensor y(x.n, x.c, x.h, x.w);
    const std::size_t plane = x.plane();
    const double m = static_cast<double>(x.n) * plane;

    if (mode == Mode::train) {
        mean_c.assign(ch, 0.0);
        var_c.assign(ch, 0.0);
        for (int c = 0; c < ch; ++c) {
            double s = 0.0;
            for (int n = 0; n < x.n; ++n) {
                const double* x0 = x.slab(n, c);
                for (std::size_t i = 0; i < plane; ++i) s += x0[i];
            }
            const double mu = s / m;
            double v2 = 0.0;
            for (int n = 0; n < x.n; ++n) {
                const double* x0 = x.slab(n, c);
                for (std::size_t i = 0; i < plane; ++i) {
                    const double d = x0[i] - mu;
                    v2 += d * d;
                }
            }
            const double var = v2 / m;
            mean_c[c] = mu;
            var_c[c] = var;
            run_mean[c] = (1.0 - momentum) * run_mean[c] + momentum * mu;
            const double unbias = m > 1.0 ? m / (m - 1.0) : 1.0;
            run_var[c] = (1.0 - momentum) * run_var[c] + momentum * var * unbias;
            const double inv = 1.0 / std::sqrt(var + eps);
            for (int n = 0; n < x.n; ++n) {
                const double* x0 = x.slab(n, c);
                double* y0 = y.slab(n, c);
                for (std::size_t i = 0; i < plane; ++i)
                    y0[i] = gamma[c] * (x0[i] - mu) * inv + beta[c];
            }
        }
    } else {
        for (int c = 0; c < ch; ++c) {
            const double inv = 1.0 / std::sqrt(run_var[c] + eps);
            for (int n = 0; n < x.n; ++n) {
                const double* x0 = x.slab(n, c);
                double* y0 = y.slab(n, c);
                for (std::size_t i = 0; i < plane; ++i)
                    y0[i] = gamma[c] * (x0[i] - run_mean[c]) * inv + beta[c];
            }
        }
    }
    return y;
}

Tensor BatchNorm2d::backward(const Tensor& dy) {
    const Tensor& x = x_cache;
    if (!dy.same_shape(x)) throw ShapeMismatch("BatchNorm2d::backward upstream shape");
    Tensor dx(x.n, x.c, x.h, x.w);
    const std::size_t plane = x.plane();
    const double m = static_cast<double>(x.n) * plane;

    for (int c = 0; c < ch; ++c) {
        const double mu = mode_c == Mode::train ? mean_c[c] : run_mean[c];
        const double var = mode_c == Mode::train ? var_c[c] : run_var[c];
        const double inv = 1.0 / std::sqrt(var + eps);
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int n = 0; n < x.n; ++n) {
            const double* x0 = x.slab(n, c);
            const double* d0 = dy.slab(n, c);
            for (std::size_t i = 0; i < plane; ++i) {
                sum_dy += d0[i];
                sum_dy_xhat += d0[i] * (x0[i] - mu) * inv;
            }
        }
        ggamma[c] += sum_dy_xhat;
        gbeta[c] += sum_dy;
        if (mode_c == Mode::train) {
            const double k = gamma[c] * inv / m;
            for (int n = 0; n < x.n; ++n) {
                const double* x0 = x.slab(n, c);
                const double* d0 = dy.slab(n, c);
                double* dx0 = dx.slab(n, c);
                for (std::size_t i = 0; i < plane; ++i) {
                    const double xhat = (x0[i] - mu) * inv;
                    dx0[i] = k * (m * d0[i] - sum_dy - xhat * sum_dy_xhat);
                }
            }
        } else {
            const double k = gamma[c] * inv;
            for (int n = 0; n < x.n; ++n) {
                const double* d0 = dy.slab(n, c);
                double* dx0 = dx.slab(n, c);
                for (std::size_t i = 0; i < plane; ++i) dx0[i] = k * d0[i];
            }
        }
    }
    return dx;
}

Tensor PReLU::forward(const Tensor& x) {
    x_cache = x;
    Tensor y = x;
    for (auto& t : y.v)
        if (t < 0.0) t *= a;
    return y;
}

Tensor PReLU::backward(const Tensor& dy) {
    const Tensor& x = x_cache;
    if (!dy.same_shape(x)) throw ShapeMismatch("PReLU::backward upstream shape");
    Tensor dx(x.n, x.c, x.h, x.w);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.v[i] > 0.0) {
            dx.v[i] = dy.v[i];
        } else {
            dx.v[i] = dy.v[i] * a;
            acc += dy.v[i] * x.v[i];
        }
    }
    ga += acc;
    return dx;
}

Tensor MaxPool2::forward(const Tensor& x) {
    if (x.h % 2 != 0 || x.w % 2 != 0) throw ShapeMismatch("MaxPool2: odd spatial size");
    xn = x.n;
    xc = x.c;
    xh = x.h;
    xw = x.w;
    Tensor y(x.n, x.c, x.h / 2, x.w / 2);
    argmax_cache.assign(y.size(), 0);
    std::size_t o = 0;
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < x.c; ++c) {
            const double* x0 = x.slab(n, c);
            const std::size_t base = (static_cast<std::size_t>(n) * x.c + c) * x.plane();
            for (int oh = 0; oh < y.h; ++oh)
                for (int ow = 0; ow < y.w; ++ow, ++o) {
                    const std::size_t i00 = static_cast<std::size_t>(2 * oh) * x.w + 2 * ow;
                    std::size_t best = i00;
                    double bv = x0[i00];
                    const std::size_t cand[3] = {i00 + 1, i00 + x.w, i00 + x.w + 1};
                    for (std::size_t k : cand)
                        if (x0[k] > bv) {
                            bv = x0[k];
                            best = k;
                        }
                    y.v[o] = bv;
                    argmax_cache[o] = base + best;
                }
        }
    return y;
}

Tensor MaxPool2::backward(const Tensor& dy) {
    dy.require_shape(xn, xc, xh / 2, xw / 2, "MaxPool2::backward upstream shape");
    Tensor dx(xn, xc, xh, xw);
    for (std::size_t o = 0; o < dy.size(); ++o) dx.v[argmax_cache[o]] += dy.v[o];
    return dx;
}

Tensor UpsampleNearest2::forward(const Tensor& x) {
    xn = x.n;
    xc = x.c;
    xh = x.h;
    xw = x.w;
    Tensor y(x.n, x.c, x.h * 2, x.w * 2);
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < x.c; ++c) {
            const double* x0 = x.slab(n, c);
            double* y0 = y.slab(n, c);
            for (int oh = 0; oh < y.h; ++oh) {
                const double* xr = x0 + static_cast<std::size_t>(oh / 2) * x.w;
                double* yr = y0 + static_cast<std::size_t>(oh) * y.w;
                for (int ow = 0; ow < y.w; ++ow) yr[ow] = xr[ow / 2];
            }
        }
    return y;
}

Tensor UpsampleNearest2::backward(const Tensor& dy) {
    dy.require_shape(xn, xc, xh * 2, xw * 2, "UpsampleNearest2::backward upstream shape");
    Tensor dx(xn, xc, xh, xw);
    for (int n = 0; n < xn; ++n)
        for (int c = 0; c < xc; ++c) {
            const double* d0 = dy.slab(n, c);
            double* dx0 = dx.slab(n, c);
            for (int oh = 0; oh < dy.h; ++oh) {
                const double* dr = d0 + static_cast<std::size_t>(oh) * dy.w;
                double* xr = dx0 + static_cast<std::size_t>(oh / 2) * xw;
                for (int ow = 0; ow < dy.w; ++ow) xr[ow / 2] += dr[ow];
            }
        }
    return dx;
}

Tensor Sigmoid::forward(const Tensor& x) {
    Tensor y = x;
    for (auto& t : y.v) t = 1.0 / (1.0 + std::exp(-t));
    y_cache = y;
    return y;
}

Tensor Sigmoid::backward(const Tensor& dy) {
    if (!dy.same_shape(y_cache)) throw ShapeMismatch("Sigmoid::backward upstream shape");
    Tensor dx(dy.n, dy.c, dy.h, dy.w);
    for (std::size_t i = 0; i < dy.size(); ++i) {
        const double y = y_cache.v[i];
        dx.v[i] = dy.v[i] * y * (1.0 - y);
    }
    return dx;
}

Tensor AdaptiveSigmoid::forward(const Tensor& x) {
    x_cache = x;
    Tensor y = x;
    for (auto& t : y.v) t = 1.0 / (1.0 + std::exp(-a * t));
    y_cache = y;
    return y;
}

Tensor AdaptiveSigmoid::backward(const Tensor& dy) {
    if (!dy.same_shape(y_cache)) throw ShapeMismatch("AdaptiveSigmoid::backward upstream shape");
    Tensor dx(dy.n, dy.c, dy.h, dy.w);
    double acc = 0.0;
    for (std::size_t i = 0; i < dy.size(); ++i) {
        const double y = y_cache.v[i];
        const double s = dy.v[i] * y * (1.0 - y);
        dx.v[i] = s * a;
        acc += s * x_cache.v[i];
    }
    ga += acc;
    return dx;
}

Tensor ReplicationPad1::forward(const Tensor& x) {
    xn = x.n;
    xc = x.c;
    xh = x.h;
    xw = x.w;
    Tensor y(x.n, x.c, x.h + 2, x.w + 2);
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < x.c; ++c) {
            const double* x0 = x.slab(n, c);
            double* y0 = y.slab(n, c);
            for (int oh = 0; oh < y.h; ++oh) {
                const int ih = std::clamp(oh - 1, 0, x.h - 1);
                const double* xr = x0 + static_cast<std::size_t>(ih) * x.w;
                double* yr = y0 + static_cast<std::size_t>(oh) * y.w;
                for (int ow = 0; ow < y.w; ++ow) yr[ow] = xr[std::clamp(ow - 1, 0, x.w - 1)];
            }
        }
    return y;
}

Tensor ReplicationPad1::backward(const Tensor& dy) {
    dy.require_shape(xn, xc, xh + 2, xw + 2, "ReplicationPad1::backward upstream shape");
    Tensor dx(xn, xc, xh, xw);
    for (int n = 0; n < xn; ++n)
        for (int c = 0; c < xc; ++c) {
            const double* d0 = dy.slab(n, c);
            double* dx0 = dx.slab(n, c);
            for (int oh = 0; oh < dy.h; ++oh) {
                const int ih = std::clamp(oh - 1, 0, xh - 1);
                const double* dr = d0 + static_cast<std::size_t>(oh) * dy.w;
                double* xr = dx0 + static_cast<std::size_t>(ih) * xw;
                for (int ow = 0; ow < dy.w; ++ow) xr[std::clamp(ow - 1, 0, xw - 1)] += dr[ow];
            }
        }
    return dx;
}

}  // namespace nn
}  // namespace fwi

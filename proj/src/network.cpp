#include "fwi/network.hpp"

#include <cmath>

namespace fwi {
namespace nn {

std::size_t Network::param_count() {
    std::size_t total = 0;
    for (const auto& t : state())
        if (t.learnable) total += t.len;
    return total;
}

void Network::zero_grad() {
    for (auto& t : state())
        if (t.grad) std::fill(t.grad, t.grad + t.len, 0.0);
}

std::vector<double> Network::flat_params() {
    std::vector<double> out;
    for (const auto& t : state())
        if (t.learnable) out.insert(out.end(), t.data, t.data + t.len);
    return out;
}

std::vector<double> Network::flat_grads() {
    std::vector<double> out;
    for (const auto& t : state())
        if (t.learnable) out.insert(out.end(), t.grad, t.grad + t.len);
    return out;
}

void Network::set_flat_params(const std::vector<double>& p) {
    std::size_t off = 0;
    for (auto& t : state()) {
        if (!t.learnable) continue;
        if (off + t.len > p.size()) throw ShapeMismatch("set_flat_params: vector too short");
        std::copy(p.begin() + off, p.begin() + off + t.len, t.data);
        off += t.len;
    }
    if (off != p.size()) throw ShapeMismatch("set_flat_params: length mismatch");
}

void Network::init_weights(std::uint64_t seed) {
    Rng rng(seed);
    Conv2d* last = &final_conv_layer();
    // State tensors come in declaration order, which fixes the draw order.
    for (auto& t : state()) {
        if (!t.learnable) continue;
        if (t.name.ends_with(".w") && t.dims.size() == 4) {
            const int oc = t.dims[0], ic = t.dims[1];
            if (t.data == last->w.data()) continue;  // handled after the loop
            const double lim = std::sqrt(6.0 / (ic * 9.0 + oc * 9.0));
            for (std::size_t i = 0; i < t.len; ++i) t.data[i] = rng.uniform(-lim, lim);
        } else if (t.name.ends_with(".b") && t.dims.size() == 1) {
            if (t.data == last->b.data()) continue;
            std::fill(t.data, t.data + t.len, 0.0);
        } else if (t.name.ends_with(".prelu")) {
            std::fill(t.data, t.data + t.len, 0.25);
        } else if (t.name.ends_with(".bn.gamma")) {
            std::fill(t.data, t.data + t.len, 1.0);
        } else if (t.name.ends_with(".bn.beta")) {
            std::fill(t.data, t.data + t.len, 0.0);
        } else if (t.name.ends_with(".asig")) {
            std::fill(t.data, t.data + t.len, 1.0);
        }
    }
    for (auto& t : state()) {
        if (t.name.ends_with(".bn.run_mean")) std::fill(t.data, t.data + t.len, 0.0);
        if (t.name.ends_with(".bn.run_var")) std::fill(t.data, t.data + t.len, 1.0);
    }
    // Last-layer trick: narrow normal weights, high bias, so the initial
    // prediction is near-homogeneous material.
    for (auto& x : last->w) x = 0.01 * rng.normal();
    std::fill(last->b.begin(), last->b.end(), 3.0);
}

namespace {

void push_conv(std::vector<StateTensor>& out, const std::string& base, Conv2d& c) {
    out.push_back({base + ".w", c.w.data(), c.gw.data(), c.w.size(),
                   {c.out_ch, c.in_ch, 3, 3}, true});
    out.push_back({base + ".b", c.b.data(), c.gb.data(), c.b.size(), {c.out_ch}, true});
}

void push_bn(std::vector<StateTensor>& out, const std::string& base, BatchNorm2d& bn) {
    out.push_back({base + ".bn.gamma", bn.gamma.data(), bn.ggamma.data(), bn.gamma.size(),
                   {bn.ch}, true});
    out.push_back({base + ".bn.beta", bn.beta.data(), bn.gbeta.data(), bn.beta.size(),
                   {bn.ch}, true});
    out.push_back({base + ".bn.run_mean", bn.run_mean.data(), nullptr, bn.run_mean.size(),
                   {bn.ch}, false});
    out.push_back({base + ".bn.run_var", bn.run_var.data(), nullptr, bn.run_var.size(),
                   {bn.ch}, false});
}

void push_prelu(std::vector<StateTensor>& out, const std::string& base, PReLU& p) {
    out.push_back({base + ".prelu", &p.a, &p.ga, 1, {1}, true});
}

}  // namespace

// ---------------------------------------------------------------------------
// GeneratorNet

GeneratorNet::GeneratorNet(int out_h_, int out_w_, int in_ch_,
                           std::vector<std::array<int, 2>> plan)
    : in_ch(in_ch_), out_h(out_h_), out_w(out_w_) {
    const int depth = static_cast<int>(plan.size());
    if (depth < 1) throw ConfigError("GeneratorNet: empty plan");
    const int scale = 1 << depth;
    if (out_h % scale != 0 || out_w % scale != 0)
        throw ConfigError("GeneratorNet: output size not divisible by 2^levels");
    base_h = out_h / scale;
    base_w = out_w / scale;
    int prev = in_ch;
    for (const auto& [c1, c2] : plan) {
        GenLevel lv;
        lv.conv1 = Conv2d(prev, c1, 1);
        lv.conv2 = Conv2d(c1, c2, 1);
        levels.push_back(std::move(lv));
        prev = c2;
    }
    final_conv = Conv2d(prev, 1, 0);
}

GeneratorNet GeneratorNet::paper_arch(int out_h, int out_w) {
    return GeneratorNet(out_h, out_w, 128,
                        {{{128, 128}}, {{64, 64}}, {{64, 64}}, {{32, 32}}, {{32, 32}}});
}

GeneratorNet GeneratorNet::mini_arch(int out_h, int out_w) {
    return GeneratorNet(out_h, out_w, 8, {{{8, 8}}, {{4, 4}}});
}

Tensor GeneratorNet::forward(const Tensor& x, Mode) {
    x.require_shape(x.n, in_ch, base_h, base_w, "GeneratorNet: input shape");
    shape_trace_.clear();
    shape_trace_.push_back({x.c, x.h, x.w});
    Tensor cur = x;
    for (auto& lv : levels) {
        cur = lv.up.forward(cur);
        shape_trace_.push_back({cur.c, cur.h, cur.w});
        cur = lv.act1.forward(lv.conv1.forward(cur));
        shape_trace_.push_back({cur.c, cur.h, cur.w});
        cur = lv.act2.forward(lv.conv2.forward(cur));
        shape_trace_.push_back({cur.c, cur.h, cur.w});
    }
    cur = final_act.forward(final_conv.forward(cur));
    shape_trace_.push_back({cur.c, cur.h, cur.w});
    return final_pad.forward(cur);
}

Tensor GeneratorNet::backward(const Tensor& dy) {
    Tensor d = final_pad.backward(dy);
    d = final_conv.backward(final_act.backward(d));
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        d = it->conv2.backward(it->act2.backward(d));
        d = it->conv1.backward(it->act1.backward(d));
        d = it->up.backward(d);
    }
    return d;
}

std::vector<StateTensor> GeneratorNet::state() {
    std::vector<StateTensor> out;
    int i = 0;
    for (auto& lv : levels) {
        const std::string base = "gen.l" + std::to_string(i++);
        push_conv(out, base + ".conv1", lv.conv1);
        push_prelu(out, base + ".act1", lv.act1);
        push_conv(out, base + ".conv2", lv.conv2);
        push_prelu(out, base + ".act2", lv.act2);
    }
    push_conv(out, "gen.final", final_conv);
    out.push_back({"gen.final.asig", &final_act.a, &final_act.ga, 1, {1}, true});
    return out;
}

std::vector<LayerInfo> GeneratorNet::layer_table() const {
    std::vector<LayerInfo> rows;
    int h = base_h, w = base_w;
    rows.push_back({"input", in_ch, h, w, 0});
    for (const auto& lv : levels) {
        h *= 2;
        w *= 2;
        rows.push_back({"upsample", lv.conv1.in_ch, h, w, 0});
        rows.push_back({"conv3x3+prelu", lv.conv1.out_ch, h, w, lv.conv1.param_count() + 1});
        rows.push_back({"conv3x3+prelu", lv.conv2.out_ch, h, w, lv.conv2.param_count() + 1});
    }
    rows.push_back({"conv3x3(no pad)+adaptive sigmoid", 1, h - 2, w - 2,
                    final_conv.param_count() + 1});
    return rows;
}

// ---------------------------------------------------------------------------
// UNet

UNet::UNet(int in_h_, int in_w_, int in_ch_, std::vector<int> widths_)
    : in_ch(in_ch_), in_h(in_h_), in_w(in_w_), widths(std::move(widths_)) {
    const int depth = static_cast<int>(widths.size());
    if (depth < 1) throw ConfigError("UNet: empty widths");
    const int scale = 1 << depth;
    if (in_h % scale != 0 || in_w % scale != 0)
        throw ConfigError("UNet: input size not divisible by 2^depth");
    int prev = in_ch;
    for (int i = 0; i < depth; ++i) {
        UNetEnc e;
        e.c1 = {Conv2d(prev, widths[i], 1), BatchNorm2d(widths[i]), PReLU{}};
        e.c2 = {Conv2d(widths[i], widths[i], 1), BatchNorm2d(widths[i]), PReLU{}};
        enc.push_back(std::move(e));
        prev = widths[i];
    }
    const int wb = widths.back();
    b1 = {Conv2d(wb, wb, 1), BatchNorm2d(wb), PReLU{}};
    b2 = {Conv2d(wb, wb, 1), BatchNorm2d(wb), PReLU{}};
    // Decoder block j consumes the upsampled deeper features concatenated
    // with the pooled encoder output of matching resolution.
    int cur = wb;
    for (int j = depth - 2; j >= 0; --j) {
        UNetDec d;
        const int skip = widths[j];
        const int out = widths[j];
        d.c1 = {Conv2d(cur + skip, out, 1), BatchNorm2d(out), PReLU{}};
        d.c2 = {Conv2d(out, out, 1), PReLU{}};
        dec.push_back(std::move(d));
        cur = out;
    }
    cf1 = {Conv2d(cur + in_ch, in_ch, 1), BatchNorm2d(in_ch), PReLU{}};
    conv_f2 = Conv2d(in_ch, in_ch, 1);
}

UNet UNet::paper_arch(int in_h, int in_w) { return UNet(in_h, in_w, 1, {16, 32, 64, 128}); }

UNet UNet::mini_arch(int in_h, int in_w) { return UNet(in_h, in_w, 1, {3, 4}); }

namespace {

Tensor cba_forward(ConvBNAct& m, const Tensor& x, Mode mode) {
    return m.act.forward(m.bn.forward(m.conv.forward(x), mode));
}

Tensor cba_backward(ConvBNAct& m, const Tensor& dy) {
    return m.conv.backward(m.bn.backward(m.act.backward(dy)));
}

}  // namespace

Tensor UNet::forward(const Tensor& x, Mode mode) {
    x.require_shape(x.n, in_ch, in_h, in_w, "UNet: input shape");
    shape_trace_.clear();
    shape_trace_.push_back({x.c, x.h, x.w});
    skip_cache_.clear();
    skip_cache_.push_back(x);
    Tensor cur = x;
    const int depth = static_cast<int>(enc.size());
    for (int i = 0; i < depth; ++i) {
        cur = cba_forward(enc[i].c1, cur, mode);
        shape_trace_.push_back({cur.c, cur.h, cur.w});
        cur = cba_forward(enc[i].c2, cur, mode);
        shape_trace_.push_back({cur.c, cur.h, cur.w});
        cur = enc[i].pool.forward(cur);
        shape_trace_.push_back({cur.c, cur.h, cur.w});
        if (i + 1 < depth) skip_cache_.push_back(cur);
    }
    cur = cba_forward(b1, cur, mode);
    shape_trace_.push_back({cur.c, cur.h, cur.w});
    cur = cba_forward(b2, cur, mode);
    shape_trace_.push_back({cur.c, cur.h, cur.w});
    for (std::size_t j = 0; j < dec.size(); ++j) {
        cur = dec[j].up.forward(cur);
        shape_trace_.push_back({cur.c, cur.h, cur.w});
        cur = concat_channels(cur, skip_cache_[dec.size() - j]);
        cur = cba_forward(dec[j].c1, cur, mode);
        shape_trace_.push_back({cur.c, cur.h, cur.w});
        cur = dec[j].c2.act.forward(dec[j].c2.conv.forward(cur));
        shape_trace_.push_back({cur.c, cur.h, cur.w});
    }
    cur = up_f.forward(cur);
    shape_trace_.push_back({cur.c, cur.h, cur.w});
    cur = concat_channels(cur, skip_cache_[0]);
    cur = cba_forward(cf1, cur, mode);
    shape_trace_.push_back({cur.c, cur.h, cur.w});
    cur = sig_f.forward(conv_f2.forward(cur));
    shape_trace_.push_back({cur.c, cur.h, cur.w});
    return cur;
}

Tensor UNet::backward(const Tensor& dy) {
    const int depth = static_cast<int>(enc.size());
    std::vector<Tensor> dskip(skip_cache_.size());
    Tensor d = conv_f2.backward(sig_f.backward(dy));
    d = cba_backward(cf1, d);
    {
        Tensor dup(d.n, d.c - in_ch, d.h, d.w);
        dskip[0] = Tensor(d.n, in_ch, d.h, d.w);
        split_channels(d, dup, dskip[0]);
        d = up_f.backward(dup);
    }
    for (int j = static_cast<int>(dec.size()) - 1; j >= 0; --j) {
        d = dec[j].c2.conv.backward(dec[j].c2.act.backward(d));
        d = cba_backward(dec[j].c1, d);
        const std::size_t k = dec.size() - j;
        const Tensor& skip = skip_cache_[k];
        Tensor dup(d.n, d.c - skip.c, d.h, d.w);
        dskip[k] = Tensor(d.n, skip.c, d.h, d.w);
        split_channels(d, dup, dskip[k]);
        d = dec[j].up.backward(dup);
    }
    d = cba_backward(b1, cba_backward(b2, d));
    for (int i = depth - 1; i >= 0; --i) {
        if (i + 1 < depth)
            for (std::size_t t = 0; t < d.size(); ++t) d.v[t] += dskip[i + 1].v[t];
        d = enc[i].pool.backward(d);
        d = cba_backward(enc[i].c2, d);
        d = cba_backward(enc[i].c1, d);
    }
    for (std::size_t t = 0; t < d.size(); ++t) d.v[t] += dskip[0].v[t];
    return d;
}

std::vector<StateTensor> UNet::state() {
    std::vector<StateTensor> out;
    const auto push_cba = [&out](const std::string& base, ConvBNAct& m) {
        push_conv(out, base + ".conv", m.conv);
        push_bn(out, base, m.bn);
        push_prelu(out, base, m.act);
    };
    for (std::size_t i = 0; i < enc.size(); ++i) {
        const std::string base = "unet.enc" + std::to_string(i);
        push_cba(base + ".c1", enc[i].c1);
        push_cba(base + ".c2", enc[i].c2);
    }
    push_cba("unet.b1", b1);
    push_cba("unet.b2", b2);
    for (std::size_t j = 0; j < dec.size(); ++j) {
        const std::string base = "unet.dec" + std::to_string(j);
        push_cba(base + ".c1", dec[j].c1);
        push_conv(out, base + ".c2.conv", dec[j].c2.conv);
        push_prelu(out, base + ".c2", dec[j].c2.act);
    }
    push_cba("unet.cf1", cf1);
    push_conv(out, "unet.final", conv_f2);
    return out;
}

std::vector<LayerInfo> UNet::layer_table() const {
    std::vector<LayerInfo> rows;
    int h = in_h, w = in_w;
    rows.push_back({"input", in_ch, h, w, 0});
    for (const auto& e : enc) {
        rows.push_back({"conv3x3+bn+prelu", e.c1.conv.out_ch, h, w,
                        e.c1.conv.param_count() + e.c1.bn.param_count() + 1});
        rows.push_back({"conv3x3+bn+prelu", e.c2.conv.out_ch, h, w,
                        e.c2.conv.param_count() + e.c2.bn.param_count() + 1});
        h /= 2;
        w /= 2;
        rows.push_back({"maxpool2", e.c2.conv.out_ch, h, w, 0});
    }
    rows.push_back({"conv3x3+bn+prelu", b1.conv.out_ch, h, w,
                    b1.conv.param_count() + b1.bn.param_count() + 1});
    rows.push_back({"conv3x3+bn+prelu", b2.conv.out_ch, h, w,
                    b2.conv.param_count() + b2.bn.param_count() + 1});
    for (const auto& d : dec) {
        h *= 2;
        w *= 2;
        rows.push_back({"upsample", d.c1.conv.in_ch - d.c1.conv.out_ch, h, w, 0});
        rows.push_back({"conv3x3+bn+prelu", d.c1.conv.out_ch, h, w,
                        d.c1.conv.param_count() + d.c1.bn.param_count() + 1});
        rows.push_back({"conv3x3+prelu", d.c2.conv.out_ch, h, w, d.c2.conv.param_count() + 1});
    }
    h *= 2;
    w *= 2;
    rows.push_back({"upsample", cf1.conv.in_ch - in_ch, h, w, 0});
    rows.push_back({"conv3x3+bn+prelu", cf1.conv.out_ch, h, w,
                    cf1.conv.param_count() + cf1.bn.param_count() + 1});
    rows.push_back({"conv3x3+sigmoid", conv_f2.out_ch, h, w, conv_f2.param_count()});
    return rows;
}

Tensor make_noise_input(int c, int h, int w, std::uint64_t seed) {
    Tensor t(1, c, h, w);
    Rng rng(seed);
    for (auto& x : t.v) x = rng.normal();
    return t;
}

}  // namespace nn
}  // namespace fwi

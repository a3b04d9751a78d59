#include "prnuda/tape.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace prnuda {
namespace {

inline int conv_out_dim(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

// 3x3 stride-1 pad-1 fast path: unrolled taps, interior/edge split.
void conv3x3_s1_forward(const double* x, int ci, int h, int w_, const double* w,
                        const double* b, int co, double* y) {
    const std::size_t plane = static_cast<std::size_t>(h) * w_;
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < co; ++oc) {
        double* yp = y + oc * plane;
        std::fill(yp, yp + plane, b[oc]);
        for (int ic = 0; ic < ci; ++ic) {
            const double* xp = x + ic * plane;
            const double* wp = w + (static_cast<std::size_t>(oc) * ci + ic) * 9;
            for (int oy = 0; oy < h; ++oy) {
                double* yrow = yp + static_cast<std::size_t>(oy) * w_;
                for (int ky = 0; ky < 3; ++ky) {
                    const int iy = oy - 1 + ky;
                    if (iy < 0 || iy >= h) continue;
                    const double* xrow = xp + static_cast<std::size_t>(iy) * w_;
                    const double w0 = wp[ky * 3], w1 = wp[ky * 3 + 1], w2 = wp[ky * 3 + 2];
                    yrow[0] += w1 * xrow[0] + w2 * xrow[1];
                    for (int ox = 1; ox < w_ - 1; ++ox)
                        yrow[ox] += w0 * xrow[ox - 1] + w1 * xrow[ox] + w2 * xrow[ox + 1];
                    if (w_ > 1)
                        yrow[w_ - 1] += w0 * xrow[w_ - 2] + w1 * xrow[w_ - 1];
                }
            }
        }
    }
}

void conv3x3_s1_backward_input(const double* w, const double* dy, int ci, int h, int w_,
                               int co, double* dx) {
    const std::size_t plane = static_cast<std::size_t>(h) * w_;
#pragma omp parallel for schedule(static)
    for (int ic = 0; ic < ci; ++ic) {
        double* dxp = dx + ic * plane;
        for (int oc = 0; oc < co; ++oc) {
            const double* dyp = dy + oc * plane;
            const double* wp = w + (static_cast<std::size_t>(oc) * ci + ic) * 9;
            for (int iy = 0; iy < h; ++iy) {
                double* dxrow = dxp + static_cast<std::size_t>(iy) * w_;
                // dy rows that touch input row iy: oy = iy+1-ky
                for (int ky = 0; ky < 3; ++ky) {
                    const int oy = iy + 1 - ky;
                    if (oy < 0 || oy >= h) continue;
                    const double* dyrow = dyp + static_cast<std::size_t>(oy) * w_;
                    const double w0 = wp[ky * 3], w1 = wp[ky * 3 + 1], w2 = wp[ky * 3 + 2];
                    // ix = ox - 1 + kx  =>  dx[ix] += w[kx] * dy[ix + 1 - kx]
                    dxrow[0] += w1 * dyrow[0] + w0 * dyrow[1];
                    for (int ix = 1; ix < w_ - 1; ++ix)
                        dxrow[ix] += w2 * dyrow[ix - 1] + w1 * dyrow[ix] + w0 * dyrow[ix + 1];
                    if (w_ > 1)
                        dxrow[w_ - 1] += w2 * dyrow[w_ - 2] + w1 * dyrow[w_ - 1];
                }
            }
        }
    }
}

void conv3x3_s1_backward_params(const double* x, const double* dy, int ci, int h,
                                int w_, int co, double* dw, double* db) {
    const std::size_t plane = static_cast<std::size_t>(h) * w_;
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < co; ++oc) {
        const double* dyp = dy + oc * plane;
        double dbv = 0.0;
        for (std::size_t i = 0; i < plane; ++i) dbv += dyp[i];
        db[oc] += dbv;
        for (int ic = 0; ic < ci; ++ic) {
            const double* xp = x + ic * plane;
            double* dwp = dw + (static_cast<std::size_t>(oc) * ci + ic) * 9;
            double acc[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
            for (int oy = 0; oy < h; ++oy) {
                const double* dyrow = dyp + static_cast<std::size_t>(oy) * w_;
                for (int ky = 0; ky < 3; ++ky) {
                    const int iy = oy - 1 + ky;
                    if (iy < 0 || iy >= h) continue;
                    const double* xrow = xp + static_cast<std::size_t>(iy) * w_;
                    double a0 = 0, a1 = 0, a2 = 0;
                    a1 += dyrow[0] * xrow[0];
                    if (w_ > 1) a2 += dyrow[0] * xrow[1];
                    for (int ox = 1; ox < w_ - 1; ++ox) {
                        const double g = dyrow[ox];
                        a0 += g * xrow[ox - 1];
                        a1 += g * xrow[ox];
                        a2 += g * xrow[ox + 1];
                    }
                    if (w_ > 1) {
                        a0 += dyrow[w_ - 1] * xrow[w_ - 2];
                        a1 += dyrow[w_ - 1] * xrow[w_ - 1];
                    }
                    acc[ky * 3] += a0;
                    acc[ky * 3 + 1] += a1;
                    acc[ky * 3 + 2] += a2;
                }
            }
            for (int t = 0; t < 9; ++t) dwp[t] += acc[t];
        }
    }
}

void conv2d_forward(const double* x, int ci, int ih, int iw, const double* w,
                    const double* b, int co, int k, int stride, int pad, double* y,
                    int oh, int ow) {
    if (k == 3 && stride == 1 && pad == 1 && ih == oh && iw == ow && iw >= 2) {
        conv3x3_s1_forward(x, ci, ih, iw, w, b, co, y);
        return;
    }
    const std::size_t xplane = static_cast<std::size_t>(ih) * iw;
    const std::size_t yplane = static_cast<std::size_t>(oh) * ow;
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < co; ++oc) {
        double* yp = y + oc * yplane;
        std::fill(yp, yp + yplane, b[oc]);
        for (int ic = 0; ic < ci; ++ic) {
            const double* xp = x + ic * xplane;
            const double* wp = w + ((static_cast<std::size_t>(oc) * ci + ic) * k) * k;
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    const double wv = wp[ky * k + kx];
                    if (wv == 0.0) continue;
                    // valid output x range for this kernel tap
                    int ox0 = std::max(0, (pad - kx + stride - 1) / stride);
                    int ox1 = std::min(ow, (iw - 1 - kx + pad) / stride + 1);
                    if (ox1 <= ox0) continue;
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= ih) continue;
                        const double* xrow = xp + static_cast<std::size_t>(iy) * iw;
                        double* yrow = yp + static_cast<std::size_t>(oy) * ow;
                        const int base = -pad + kx;
                        for (int ox = ox0; ox < ox1; ++ox)
                            yrow[ox] += wv * xrow[ox * stride + base];
                    }
                }
            }
        }
    }
}

void conv2d_backward_input(const double* w, const double* dy, int ci, int ih, int iw,
                           int co, int k, int stride, int pad, double* dx, int oh,
                           int ow) {
    if (k == 3 && stride == 1 && pad == 1 && ih == oh && iw == ow && iw >= 2) {
        conv3x3_s1_backward_input(w, dy, ci, ih, iw, co, dx);
        return;
    }
    const std::size_t xplane = static_cast<std::size_t>(ih) * iw;
    const std::size_t yplane = static_cast<std::size_t>(oh) * ow;
#pragma omp parallel for schedule(static)
    for (int ic = 0; ic < ci; ++ic) {
        double* dxp = dx + ic * xplane;
        for (int oc = 0; oc < co; ++oc) {
            const double* dyp = dy + oc * yplane;
            const double* wp = w + ((static_cast<std::size_t>(oc) * ci + ic) * k) * k;
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    const double wv = wp[ky * k + kx];
                    if (wv == 0.0) continue;
                    int ox0 = std::max(0, (pad - kx + stride - 1) / stride);
                    int ox1 = std::min(ow, (iw - 1 - kx + pad) / stride + 1);
                    if (ox1 <= ox0) continue;
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= ih) continue;
                        double* dxrow = dxp + static_cast<std::size_t>(iy) * iw;
                        const double* dyrow = dyp + static_cast<std::size_t>(oy) * ow;
                        const int base = -pad + kx;
                        for (int ox = ox0; ox < ox1; ++ox)
                            dxrow[ox * stride + base] += wv * dyrow[ox];
                    }
                }
            }
        }
    }
}

void conv2d_backward_params(const double* x, const double* dy, int ci, int ih, int iw,
                            int co, int k, int stride, int pad, double* dw, double* db,
                            int oh, int ow) {
    if (k == 3 && stride == 1 && pad == 1 && ih == oh && iw == ow && iw >= 2) {
        conv3x3_s1_backward_params(x, dy, ci, ih, iw, co, dw, db);
        return;
    }
    const std::size_t xplane = static_cast<std::size_t>(ih) * iw;
    const std::size_t yplane = static_cast<std::size_t>(oh) * ow;
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < co; ++oc) {
        const double* dyp = dy + oc * yplane;
        double dbv = 0.0;
        for (std::size_t i = 0; i < yplane; ++i) dbv += dyp[i];
        db[oc] += dbv;
        for (int ic = 0; ic < ci; ++ic) {
            const double* xp = x + ic * xplane;
            double* dwp = dw + ((static_cast<std::size_t>(oc) * ci + ic) * k) * k;
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    int ox0 = std::max(0, (pad - kx + stride - 1) / stride);
                    int ox1 = std::min(ow, (iw - 1 - kx + pad) / stride + 1);
                    if (ox1 <= ox0) continue;
                    double acc = 0.0;
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= ih) continue;
                        const double* xrow = xp + static_cast<std::size_t>(iy) * iw;
                        const double* dyrow = dyp + static_cast<std::size_t>(oy) * ow;
                        const int base = -pad + kx;
                        for (int ox = ox0; ox < ox1; ++ox)
                            acc += dyrow[ox] * xrow[ox * stride + base];
                    }
                    dwp[ky * k + kx] += acc;
                }
            }
        }
    }
}

struct BilinearAxis {
    std::vector<int> i0, i1;
    std::vector<double> w0, w1;
};

BilinearAxis bilinear_axis(int in, int out) {
    BilinearAxis ax;
    ax.i0.resize(out);
    ax.i1.resize(out);
    ax.w0.resize(out);
    ax.w1.resize(out);
    const double scale = static_cast<double>(in) / out;
    for (int o = 0; o < out; ++o) {
        double s = (o + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(in - 1));
        int i0 = static_cast<int>(std::floor(s));
        int i1 = std::min(i0 + 1, in - 1);
        double f = s - i0;
        ax.i0[o] = i0;
        ax.i1[o] = i1;
        ax.w0[o] = 1.0 - f;
        ax.w1[o] = f;
    }
    return ax;
}

}  // namespace

ConvRef conv_ref(const ModelState& m, const std::string& base, int stride, int pad) {
    const LayoutEntry& w = m.entry(base + ".w");
    const LayoutEntry& b = m.entry(base + ".b");
    ConvRef r;
    r.w_off = w.offset;
    r.b_off = b.offset;
    r.out_ch = w.shape[0];
    r.in_ch = w.shape[1];
    r.kernel = w.shape[2];
    r.stride = stride;
    r.pad = pad;
    return r;
}

Tape::Tape(const std::vector<double>& params, bool recording)
    : params_(&params), recording_(recording) {
    nodes_.reserve(64);
}

Tape::NodeId Tape::push(Grid2D val, std::vector<NodeId> parents, BackFn back,
                        bool force_requires_grad) {
    Node n;
    n.val = std::move(val);
    n.parents = std::move(parents);
    n.requires_grad = force_requires_grad;
    for (NodeId p : n.parents) n.requires_grad |= nodes_[p].requires_grad;
    if (recording_) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::input(Grid2D value) { return push(std::move(value), {}, nullptr); }

Tape::NodeId Tape::scalar_input(double v) {
    Grid2D g(1, 1, 1);
    g.data[0] = v;
    return push(std::move(g), {}, nullptr);
}

const Grid2D& Tape::grad_of(NodeId id) const { return nodes_[id].grad; }

Grid2D& Tape::grad_accum(NodeId id) {
    Node& n = nodes_[id];
    if (n.grad.data.empty())
        n.grad = Grid2D(n.val.channels, n.val.height, n.val.width);
    return n.grad;
}

Tape::NodeId Tape::conv2d(NodeId x, const ConvRef& layer) {
    const Grid2D& in = nodes_[x].val;
    if (in.channels != layer.in_ch)
        throw std::invalid_argument("conv2d: input channel mismatch");
    const int oh = conv_out_dim(in.height, layer.kernel, layer.stride, layer.pad);
    const int ow = conv_out_dim(in.width, layer.kernel, layer.stride, layer.pad);
    Grid2D out(layer.out_ch, oh, ow);
    conv2d_forward(in.data.data(), layer.in_ch, in.height, in.width,
                   params_->data() + layer.w_off, params_->data() + layer.b_off,
                   layer.out_ch, layer.kernel, layer.stride, layer.pad,
                   out.data.data(), oh, ow);
    ConvRef lr = layer;
    return push(
        std::move(out), {x},
        [lr, x](Tape& t, NodeId self) {
            const Grid2D& dy = t.nodes_[self].grad;
            const Grid2D& in2 = t.nodes_[x].val;
            conv2d_backward_params(in2.data.data(), dy.data.data(), lr.in_ch, in2.height,
                                   in2.width, lr.out_ch, lr.kernel, lr.stride, lr.pad,
                                   t.pgrad_->data() + lr.w_off,
                                   t.pgrad_->data() + lr.b_off, dy.height, dy.width);
            // no input gradient into detached subgraphs
            if (!t.nodes_[x].requires_grad) return;
            Grid2D& dx = t.grad_accum(x);
            conv2d_backward_input(t.params_->data() + lr.w_off, dy.data.data(), lr.in_ch,
                                  in2.height, in2.width, lr.out_ch, lr.kernel, lr.stride,
                                  lr.pad, dx.data.data(), dy.height, dy.width);
        },
        /*force_requires_grad=*/true);
}

Tape::NodeId Tape::relu(NodeId x) {
    const Grid2D& in = nodes_[x].val;
    Grid2D out = in;
    for (double& v : out.data)
        if (v < 0.0) v = 0.0;
    return push(std::move(out), {x}, [x](Tape& t, NodeId self) {
        const Grid2D& dy = t.nodes_[self].grad;
        const Grid2D& in2 = t.nodes_[x].val;
        Grid2D& dx = t.grad_accum(x);
        for (std::size_t i = 0; i < dx.data.size(); ++i)
            if (in2.data[i] > 0.0) dx.data[i] += dy.data[i];
    });
}

Tape::NodeId Tape::bilinear(NodeId x, int out_h, int out_w) {
    const Grid2D& in = nodes_[x].val;
    if (in.height == out_h && in.width == out_w) return x;
    BilinearAxis ay = bilinear_axis(in.height, out_h);
    BilinearAxis axx = bilinear_axis(in.width, out_w);
    Grid2D out(in.channels, out_h, out_w);
    for (int c = 0; c < in.channels; ++c) {
        const double* xp = in.channel(c);
        double* yp = out.channel(c);
        for (int oy = 0; oy < out_h; ++oy) {
            const double* r0 = xp + static_cast<std::size_t>(ay.i0[oy]) * in.width;
            const double* r1 = xp + static_cast<std::size_t>(ay.i1[oy]) * in.width;
            double* orow = yp + static_cast<std::size_t>(oy) * out_w;
            for (int ox = 0; ox < out_w; ++ox) {
                orow[ox] = ay.w0[oy] * (axx.w0[ox] * r0[axx.i0[ox]] + axx.w1[ox] * r0[axx.i1[ox]]) +
                           ay.w1[oy] * (axx.w0[ox] * r1[axx.i0[ox]] + axx.w1[ox] * r1[axx.i1[ox]]);
            }
        }
    }
    return push(std::move(out), {x},
                [x, ay = std::move(ay), axx = std::move(axx)](Tape& t, NodeId self) {
                    const Grid2D& dy = t.nodes_[self].grad;
                    Grid2D& dx = t.grad_accum(x);
                    for (int c = 0; c < dx.channels; ++c) {
                        double* dxp = dx.channel(c);
                        const double* dyp = dy.channel(c);
                        for (int oy = 0; oy < dy.height; ++oy) {
                            double* r0 = dxp + static_cast<std::size_t>(ay.i0[oy]) * dx.width;
                            double* r1 = dxp + static_cast<std::size_t>(ay.i1[oy]) * dx.width;
                            const double* drow = dyp + static_cast<std::size_t>(oy) * dy.width;
                            for (int ox = 0; ox < dy.width; ++ox) {
                                const double g = drow[ox];
                                r0[axx.i0[ox]] += ay.w0[oy] * axx.w0[ox] * g;
                                r0[axx.i1[ox]] += ay.w0[oy] * axx.w1[ox] * g;
                                r1[axx.i0[ox]] += ay.w1[oy] * axx.w0[ox] * g;
                                r1[axx.i1[ox]] += ay.w1[oy] * axx.w1[ox] * g;
                            }
                        }
                    }
                });
}

Tape::NodeId Tape::concat(NodeId a, NodeId b) {
    const Grid2D& ga = nodes_[a].val;
    const Grid2D& gb = nodes_[b].val;
    if (ga.height != gb.height || ga.width != gb.width)
        throw std::invalid_argument("concat: spatial mismatch");
    Grid2D out(ga.channels + gb.channels, ga.height, ga.width);
    std::copy(ga.data.begin(), ga.data.end(), out.data.begin());
    std::copy(gb.data.begin(), gb.data.end(), out.data.begin() + ga.data.size());
    return push(std::move(out), {a, b}, [a, b](Tape& t, NodeId self) {
        const Grid2D& dy = t.nodes_[self].grad;
        Grid2D& da = t.grad_accum(a);
        Grid2D& db = t.grad_accum(b);
        for (std::size_t i = 0; i < da.data.size(); ++i) da.data[i] += dy.data[i];
        for (std::size_t i = 0; i < db.data.size(); ++i)
            db.data[i] += dy.data[da.data.size() + i];
    });
}

Tape::NodeId Tape::softmax_ce(NodeId logits, const LabelMap& labels,
                              std::vector<double> pixel_weight, double denom) {
    const Grid2D& l = nodes_[logits].val;
    const int k = l.channels;
    const std::size_t plane = l.plane();
    if (labels.size() != plane || pixel_weight.size() != plane)
        throw std::invalid_argument("softmax_ce: label/weight shape mismatch");
    if (denom <= 0.0) throw std::invalid_argument("softmax_ce: denom must be > 0");
    for (std::size_t j = 0; j < plane; ++j) {
        int y = labels.data[j];
        if (y != kIgnoreLabel && (y < 0 || y >= k))
            throw std::invalid_argument("softmax_ce: label out of range");
    }
    // keep softmax probabilities for the backward pass
    auto probs = std::make_shared<Grid2D>(k, l.height, l.width);
    double loss = 0.0;
    for (std::size_t j = 0; j < plane; ++j) {
        double m = l.data[j];
        for (int c = 1; c < k; ++c) m = std::max(m, l.data[c * plane + j]);
        double sum = 0.0;
        for (int c = 0; c < k; ++c) {
            double e = std::exp(l.data[c * plane + j] - m);
            probs->data[c * plane + j] = e;
            sum += e;
        }
        const double inv = 1.0 / sum;
        for (int c = 0; c < k; ++c) probs->data[c * plane + j] *= inv;
        const int y = labels.data[j];
        if (y == kIgnoreLabel || pixel_weight[j] == 0.0) continue;
        loss -= pixel_weight[j] * std::log(std::max(probs->data[y * plane + j], 1e-300));
    }
    Grid2D out(1, 1, 1);
    out.data[0] = loss / denom;
    auto lbl = std::make_shared<LabelMap>(labels);
    auto wts = std::make_shared<std::vector<double>>(std::move(pixel_weight));
    return push(std::move(out), {logits},
                [logits, probs, lbl, wts, denom, k, plane](Tape& t, NodeId self) {
                    const double g = t.nodes_[self].grad.data[0] / denom;
                    Grid2D& dx = t.grad_accum(logits);
                    for (std::size_t j = 0; j < plane; ++j) {
                        const int y = lbl->data[j];
                        if (y == kIgnoreLabel) continue;
                        const double w = (*wts)[j];
                        if (w == 0.0) continue;
                        for (int c = 0; c < k; ++c) {
                            double p = probs->data[c * plane + j];
                            dx.data[c * plane + j] += g * w * (p - (c == y ? 1.0 : 0.0));
                        }
                    }
                });
}

Tape::NodeId Tape::sigmoid_bce(NodeId logits, const NoiseMask& target, double denom) {
    const Grid2D& l = nodes_[logits].val;
    if (l.channels != 1 || target.size() != l.plane())
        throw std::invalid_argument("sigmoid_bce: expects 1-channel logits matching mask");
    if (denom <= 0.0) throw std::invalid_argument("sigmoid_bce: denom must be > 0");
    double loss = 0.0;
    for (std::size_t j = 0; j < l.plane(); ++j) {
        const double z = l.data[j];
        const double tv = target.data[j] ? 1.0 : 0.0;
        loss += std::max(z, 0.0) - z * tv + std::log1p(std::exp(-std::abs(z)));
    }
    Grid2D out(1, 1, 1);
    out.data[0] = loss / denom;
    auto tgt = std::make_shared<NoiseMask>(target);
    return push(std::move(out), {logits}, [logits, tgt, denom](Tape& t, NodeId self) {
        const double g = t.nodes_[self].grad.data[0] / denom;
        const Grid2D& l2 = t.nodes_[logits].val;
        Grid2D& dx = t.grad_accum(logits);
        for (std::size_t j = 0; j < l2.plane(); ++j) {
            const double s = 1.0 / (1.0 + std::exp(-l2.data[j]));
            dx.data[j] += g * (s - (tgt->data[j] ? 1.0 : 0.0));
        }
    });
}

Tape::NodeId Tape::weighted_sum(const std::vector<std::pair<NodeId, double>>& terms) {
    double v = 0.0;
    std::vector<NodeId> parents;
    for (const auto& [id, c] : terms) {
        v += c * nodes_[id].val.data[0];
        parents.push_back(id);
    }
    Grid2D out(1, 1, 1);
    out.data[0] = v;
    auto ts = terms;
    return push(std::move(out), std::move(parents), [ts](Tape& t, NodeId self) {
        const double g = t.nodes_[self].grad.data[0];
        for (const auto& [id, c] : ts) t.grad_accum(id).data[0] += c * g;
    });
}

Tape::NodeId Tape::custom(std::vector<NodeId> parents, Grid2D value, BackFn back) {
    return push(std::move(value), std::move(parents), std::move(back));
}

void Tape::backward(NodeId root, std::vector<double>& param_grad) {
    if (!recording_) throw std::logic_error("Tape::backward on a non-recording tape");
    if (backward_done_) throw std::logic_error("Tape::backward called twice");
    backward_done_ = true;
    if (nodes_[root].val.size() != 1)
        throw std::invalid_argument("Tape::backward: root must be scalar");
    if (param_grad.size() != params_->size())
        param_grad.assign(params_->size(), 0.0);
    pgrad_ = &param_grad;
    grad_accum(root).data[0] = 1.0;
    for (NodeId id = root; id >= 0; --id) {
        Node& n = nodes_[id];
        if (n.grad.data.empty() || !n.back) continue;
        n.back(*this, id);
    }
    pgrad_ = nullptr;
}

}  // namespace prnuda

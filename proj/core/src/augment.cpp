#include "prnuda/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prnuda {
namespace {

int reflect(int i, int n) {
    // reflect-101-style without repeating the edge sample twice
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

}  // namespace

Grid2D color_jitter(const Grid2D& x, double strength, Rng& rng) {
    if (strength == 0.0) return x;
    const double fb = rng.uniform(1.0 - strength, 1.0 + strength);  // brightness
    const double fc = rng.uniform(1.0 - strength, 1.0 + strength);  // contrast
    const double fs = rng.uniform(1.0 - strength, 1.0 + strength);  // saturation

    Grid2D out = x;
    const std::size_t plane = x.plane();
    double mean = 0.0;
    for (double v : x.data) mean += v;
    mean /= static_cast<double>(x.data.size());

    for (std::size_t j = 0; j < plane; ++j) {
        double r = x.data[j];
        double g = x.channels > 1 ? x.data[plane + j] : r;
        double b = x.channels > 2 ? x.data[2 * plane + j] : r;
        const double gray = 0.299 * r + 0.587 * g + 0.114 * b;
        double ch[3] = {r, g, b};
        for (int c = 0; c < x.channels && c < 3; ++c) {
            double v = ch[c];
            v = gray + fs * (v - gray);   // saturation
            v = mean + fc * (v - mean);   // contrast
            v *= fb;                      // brightness
            out.data[c * plane + j] = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

Grid2D gaussian_blur(const Grid2D& x, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
    if (sigma == 0.0) return x;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        ksum += kernel[i + radius];
    }
    for (double& v : kernel) v /= ksum;

    Grid2D tmp(x.channels, x.height, x.width);
    Grid2D out(x.channels, x.height, x.width);
    for (int c = 0; c < x.channels; ++c) {
        const double* src = x.channel(c);
        double* mid = tmp.channel(c);
        for (int y = 0; y < x.height; ++y)
            for (int xx = 0; xx < x.width; ++xx) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] *
                           src[static_cast<std::size_t>(y) * x.width + reflect(xx + i, x.width)];
                mid[static_cast<std::size_t>(y) * x.width + xx] = acc;
            }
        double* dst = out.channel(c);
        for (int y = 0; y < x.height; ++y)
            for (int xx = 0; xx < x.width; ++xx) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] *
                           mid[static_cast<std::size_t>(reflect(y + i, x.height)) * x.width + xx];
                dst[static_cast<std::size_t>(y) * x.width + xx] = acc;
            }
    }
    return out;
}

MixResult classmix(const Grid2D& src_img, const LabelMap& src_lbl, const Grid2D& tgt_img,
                   const LabelMap& tgt_lbl, double fraction, Rng& rng) {
    if (!src_img.same_shape(tgt_img) || !src_lbl.same_shape(tgt_lbl))
        throw std::invalid_argument("classmix: shape mismatch");
    std::vector<int> present;
    for (int v : src_lbl.data)
        if (v != kIgnoreLabel && std::find(present.begin(), present.end(), v) == present.end())
            present.push_back(v);
    std::sort(present.begin(), present.end());

    const int n_pick = static_cast<int>(
        std::ceil(fraction * static_cast<double>(present.size()) - 1e-12));
    std::vector<int> pool = present;
    std::vector<bool> pick(256, false);
    for (int i = 0; i < n_pick && !pool.empty(); ++i) {
        int j = rng.uniform_int(static_cast<int>(pool.size()));
        pick[pool[j]] = true;
        pool.erase(pool.begin() + j);
    }

    MixResult r{tgt_img, tgt_lbl, NoiseMask(tgt_lbl.height, tgt_lbl.width)};
    const std::size_t plane = tgt_img.plane();
    for (std::size_t j = 0; j < src_lbl.size(); ++j) {
        const int lbl = src_lbl.data[j];
        if (lbl == kIgnoreLabel || !pick[lbl]) continue;
        for (int c = 0; c < src_img.channels; ++c)
            r.image.data[c * plane + j] = src_img.data[c * plane + j];
        r.labels.data[j] = lbl;
        r.source_origin.data[j] = 1;
    }
    return r;
}

MixResult mask_guided_mix(const Grid2D& tgt_img, const LabelMap& tgt_lbl,
                          const NoiseMask& m, const Grid2D& src_img,
                          const LabelMap& src_lbl) {
    if (!src_img.same_shape(tgt_img) || !src_lbl.same_shape(tgt_lbl) ||
        m.size() != tgt_lbl.size())
        throw std::invalid_argument("mask_guided_mix: shape mismatch");
    MixResult r{tgt_img, tgt_lbl, NoiseMask(tgt_lbl.height, tgt_lbl.width)};
    const std::size_t plane = tgt_img.plane();
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (!m.data[j]) continue;
        for (int c = 0; c < src_img.channels; ++c)
            r.image.data[c * plane + j] = src_img.data[c * plane + j];
        r.labels.data[j] = src_lbl.data[j];
        r.source_origin.data[j] = 1;
    }
    return r;
}

std::vector<double> mix_weights(const NoiseMask& source_origin, double eta) {
    std::vector<double> w(source_origin.size(), eta);
    for (std::size_t j = 0; j < w.size(); ++j)
        if (source_origin.data[j]) w[j] = 1.0;
    return w;
}

}  // namespace prnuda

#include "prnuda/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace prnuda {
namespace {

// Shared core of perturb_logits and fda_image.
Grid2D amplitude_swap(const Grid2D& self, const Grid2D& other, double eps,
                      double* imag_residue) {
    if (!self.same_shape(other))
        throw std::invalid_argument("amplitude swap: shape mismatch");
    FreqMask mask = low_freq_mask(self.height, self.width, eps);

    Spectrum2D ss = fft2(self);
    Spectrum2D so = fft2(other);
    const std::size_t plane = static_cast<std::size_t>(self.height) * self.width;
    for (int c = 0; c < self.channels; ++c) {
        for (std::size_t j = 0; j < plane; ++j) {
            if (!mask.data[j]) continue;
            std::size_t i = c * plane + j;
            double a_self = std::hypot(ss.re[i], ss.im[i]);
            double a_other = std::hypot(so.re[i], so.im[i]);
            if (a_self == 0.0) {
                // zero-amplitude bin carries phase 0 by convention
                ss.re[i] = a_other;
                ss.im[i] = 0.0;
            } else {
                double scale = a_other / a_self;
                ss.re[i] *= scale;
                ss.im[i] *= scale;
            }
        }
    }
    return ifft2(ss, imag_residue);
}

}  // namespace

FreqMask low_freq_mask(int h, int w, double eps) {
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::invalid_argument("low_freq_mask: eps must be in [0,1)");
    FreqMask m;
    m.height = h;
    m.width = w;
    m.epsilon = eps;
    m.data.assign(static_cast<std::size_t>(h) * w, 0);

    const int cy = h / 2, cx = w / 2;
    const int ey = static_cast<int>(std::floor(eps * h));
    const int ex = static_cast<int>(std::floor(eps * w));
    // [c-e, c+e) per axis; a zero half-extent keeps just the DC line
    const int y0 = (ey == 0) ? cy : std::max(0, cy - ey);
    const int y1 = (ey == 0) ? cy + 1 : std::min(h, cy + ey);
    const int x0 = (ex == 0) ? cx : std::max(0, cx - ex);
    const int x1 = (ex == 0) ? cx + 1 : std::min(w, cx + ex);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            m.data[static_cast<std::size_t>(y) * w + x] = 1;
    return m;
}

Grid2D perturb_logits(const Grid2D& l_self, const Grid2D& l_other, double eps,
                      double* imag_residue) {
    return amplitude_swap(l_self, l_other, eps, imag_residue);
}

NoiseMask make_noise_mask_gt(const Grid2D& l_orig, const Grid2D& l_pert) {
    if (!l_orig.same_shape(l_pert))
        throw std::invalid_argument("make_noise_mask_gt: shape mismatch");
    LabelMap a = argmax_labels(l_orig);
    LabelMap b = argmax_labels(l_pert);
    NoiseMask m(l_orig.height, l_orig.width);
    for (std::size_t j = 0; j < m.size(); ++j)
        m.data[j] = (a.data[j] != b.data[j]) ? 1 : 0;
    return m;
}

Grid2D fda_image(const Grid2D& x_src, const Grid2D& x_tgt, double eps) {
    if (x_src.channels != 3)
        throw std::invalid_argument("fda_image: expects 3-channel images");
    Grid2D out = amplitude_swap(x_src, x_tgt, eps, nullptr);
    for (double& v : out.data) v = std::clamp(v, 0.0, 1.0);
    return out;
}

}  // namespace prnuda

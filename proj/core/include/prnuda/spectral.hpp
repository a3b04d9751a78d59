#pragma once

#include "prnuda/grid.hpp"
#include "prnuda/numerics.hpp"

namespace prnuda {

// Binary low-frequency selector, 1 on the centered rectangle of half-extent
// (floor(eps*H), floor(eps*W)) around the DC bin. eps = 0 degenerates to the
// DC bin alone.
struct FreqMask {
    int height = 0;
    int width = 0;
    double epsilon = 0.0;
    std::vector<std::uint8_t> data;

    std::uint8_t at(int y, int x) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t count_ones() const {
        std::size_t n = 0;
        for (auto v : data) n += (v != 0);
        return n;
    }
};

struct PerturbConfig {
    double eps_min = 0.05;
    double eps_max = 0.2;
    std::uint64_t rng_seed = 0;
};

FreqMask low_freq_mask(int h, int w, double eps);

// Amplitude swap on logits: inside the mask the amplitude comes from l_other,
// outside from l_self; the phase of l_self is kept everywhere. The real part
// of the inverse transform is returned; *imag_residue (optional) reports the
// largest imaginary component discarded.
Grid2D perturb_logits(const Grid2D& l_self, const Grid2D& l_other, double eps,
                      double* imag_residue = nullptr);

// 1 where the argmax labels of the original and perturbed logits differ.
NoiseMask make_noise_mask_gt(const Grid2D& l_orig, const Grid2D& l_pert);

// Fourier style adaptation: same amplitude swap applied to 3-channel images
// in [0,1]; output clamped back to [0,1].
Grid2D fda_image(const Grid2D& x_src, const Grid2D& x_tgt, double eps);

}  // namespace prnuda

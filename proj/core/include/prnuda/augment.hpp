#pragma once

#include "prnuda/grid.hpp"
#include "prnuda/rng.hpp"

namespace prnuda {

struct AugConfig {
    double jitter_strength = 0.2;
    double jitter_prob = 0.5;
    double blur_prob = 0.5;
    double blur_sigma_min = 0.15;
    double blur_sigma_max = 1.15;
    double classmix_fraction = 0.5;  // fraction of present source classes pasted
    std::uint64_t rng_seed = 0;
};

// Random brightness/contrast/saturation scaling within ±strength, clamped to
// [0,1]. strength 0 is the identity.
Grid2D color_jitter(const Grid2D& x, double strength, Rng& rng);

// Separable Gaussian convolution with reflect padding. sigma 0 is the identity.
Grid2D gaussian_blur(const Grid2D& x, double sigma);

// Result of a pixel-level mix; source_origin marks pixels whose content (and
// label) came from the source pair — those carry full GT confidence.
struct MixResult {
    Grid2D image;
    LabelMap labels;
    NoiseMask source_origin;
};

// ClassMix: ceil(fraction * |classes present in src_lbl|) classes are drawn
// at random; their source pixels and labels overwrite the target pair.
MixResult classmix(const Grid2D& src_img, const LabelMap& src_lbl, const Grid2D& tgt_img,
                   const LabelMap& tgt_lbl, double fraction, Rng& rng);

// Noise-mask-guided repair: pixels with m = 1 take source image values and
// source GT labels; clean pixels keep the target pair.
MixResult mask_guided_mix(const Grid2D& tgt_img, const LabelMap& tgt_lbl,
                          const NoiseMask& m, const Grid2D& src_img,
                          const LabelMap& src_lbl);

// Per-pixel CE weights: 1 on source-origin (GT) pixels, eta elsewhere.
std::vector<double> mix_weights(const NoiseMask& source_origin, double eta);

}  // namespace prnuda

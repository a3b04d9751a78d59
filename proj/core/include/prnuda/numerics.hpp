#pragma once

#include <utility>

#include "prnuda/grid.hpp"

namespace prnuda {

// Per-channel 2D spectrum in the center-shifted layout: the DC bin sits at
// (height/2, width/2) so centered frequency masks index it directly.
struct Spectrum2D {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> re;
    std::vector<double> im;

    Spectrum2D() = default;
    Spectrum2D(int c, int h, int w)
        : channels(c), height(h), width(w),
          re(static_cast<std::size_t>(c) * h * w, 0.0),
          im(static_cast<std::size_t>(c) * h * w, 0.0) {}

    std::size_t idx(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * height + y) * width + x;
    }
    std::size_t size() const { return re.size(); }
    int dc_y() const { return height / 2; }
    int dc_x() const { return width / 2; }
};

// Unnormalized forward DFT, center-shifted. Throws on non-finite input.
Spectrum2D fft2(const Grid2D& g);

// Inverse transform; returns the real part. *imag_residue (optional) receives
// the largest |imaginary| component left after inversion — above 1e-4 on an
// unmodified spectrum it signals a caller bug.
Grid2D ifft2(const Spectrum2D& s, double* imag_residue = nullptr);

// Polar decomposition. Phase of an exactly-zero bin is 0 by convention.
std::pair<Grid2D, Grid2D> amp_phase(const Spectrum2D& s);

Spectrum2D recompose(const Grid2D& amplitude, const Grid2D& phase);

// Per-pixel channelwise softmax with max-subtraction.
Grid2D softmax_channels(const Grid2D& logits);

// Per-pixel argmax over channels; ties break to the lowest class index.
LabelMap argmax_labels(const Grid2D& logits);

// Max softmax probability per pixel (1×H×W), without materializing the full
// probability map.
Grid2D max_softmax(const Grid2D& logits);

}  // namespace prnuda

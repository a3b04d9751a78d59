#pragma once

#include <array>
#include <string>
#include <vector>

#include "prnuda/grid.hpp"

namespace prnuda {

using Palette = std::vector<std::array<std::uint8_t, 3>>;

// Distinct class colors; index 255 renders gray.
Palette default_palette(int num_classes);

// RGB in [0,1]; dispatches on extension (.png / .ppm).
Grid2D read_image(const std::string& path);
void write_image(const std::string& path, const Grid2D& img);

// 8-bit label indices, read raw (palette or grayscale PNG).
LabelMap read_label(const std::string& path);
// Indexed PNG (color type 3) with the given palette.
void write_label_png(const std::string& path, const LabelMap& labels,
                     const Palette& palette);
void write_mask_png(const std::string& path, const NoiseMask& mask);

}  // namespace prnuda

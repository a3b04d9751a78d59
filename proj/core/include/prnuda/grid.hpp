#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace prnuda {

// Label value marking pixels excluded from every loss and metric.
inline constexpr int kIgnoreLabel = 255;

// Dense (channels, height, width) grid of reals, row-major within each channel.
// Carries images (values in [0,1]), logits, probabilities and feature maps.
struct Grid2D {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Grid2D() = default;
    Grid2D(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, fill) {
        if (c < 0 || h < 0 || w < 0)
            throw std::invalid_argument("Grid2D: negative dimension");
    }

    std::size_t size() const { return data.size(); }
    std::size_t plane() const { return static_cast<std::size_t>(height) * width; }

    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double* channel(int c) { return data.data() + static_cast<std::size_t>(c) * plane(); }
    const double* channel(int c) const {
        return data.data() + static_cast<std::size_t>(c) * plane();
    }

    bool same_shape(const Grid2D& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
    bool finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

using ImageTensor = Grid2D;
using LogitsMap = Grid2D;
using ProbMap = Grid2D;

// H×W integer class indices in {0..K-1} ∪ {kIgnoreLabel}.
struct LabelMap {
    int height = 0;
    int width = 0;
    std::vector<int> data;

    LabelMap() = default;
    LabelMap(int h, int w, int fill = 0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    int& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    int at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
    bool same_shape(const LabelMap& o) const {
        return height == o.height && width == o.width;
    }
};

// H×W binary grid; 1 marks a pixel whose label is (predicted or constructed
// to be) noisy.
struct NoiseMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    NoiseMask() = default;
    NoiseMask(int h, int w, std::uint8_t fill = 0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    std::uint8_t& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int y, int x) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t size() const { return data.size(); }
    std::size_t count_ones() const {
        std::size_t n = 0;
        for (auto v : data) n += (v != 0);
        return n;
    }
};

}  // namespace prnuda

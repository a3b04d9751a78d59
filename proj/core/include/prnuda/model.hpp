#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prnuda/grid.hpp"

namespace prnuda {

// Reference architecture: encoder = 3 conv blocks (3x3, stride 2-1-2, ReLU),
// decoder = 1x1 conv to K + bilinear x4, PRN decoder = concat(features,
// downsampled logits) -> two 3x3 convs -> segmentation + noise heads.
struct ArchDescriptor {
    int in_channels = 3;
    int num_classes = 5;
    int enc_w1 = 16;
    int enc_w2 = 32;
    int enc_w3 = 64;
    int prn_width = 64;

    bool operator==(const ArchDescriptor&) const = default;
    int feature_channels() const { return enc_w3; }
    int stride() const { return 4; }
    std::string describe() const;
};

struct LayoutEntry {
    std::string name;
    std::vector<int> shape;
    std::size_t offset = 0;
    std::size_t count = 0;
};

enum class ModelKind { Segmenter, PrnDecoder };

// Flat parameter vector plus its interpretation. Two states with equal arch
// and kind are parameter-compatible (EMA-combinable).
struct ModelState {
    ArchDescriptor arch;
    ModelKind kind = ModelKind::Segmenter;
    std::vector<LayoutEntry> layout;
    std::vector<double> params;

    const LayoutEntry& entry(const std::string& name) const;
    bool compatible(const ModelState& o) const {
        return arch == o.arch && kind == o.kind && params.size() == o.params.size();
    }
};

// Kaiming-uniform conv weights, zero biases.
ModelState make_model(const ArchDescriptor& arch, ModelKind kind, std::uint64_t seed);

// Layout index ranges for the two learning-rate groups of a Segmenter
// ("enc.*" vs "dec.*"). A PrnDecoder is a single decoder-rate group.
struct ParamGroup {
    std::string name;
    std::size_t offset = 0;
    std::size_t count = 0;
};
std::vector<ParamGroup> param_groups(const ModelState& m);

}  // namespace prnuda

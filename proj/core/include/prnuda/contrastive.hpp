#pragma once

#include "prnuda/grid.hpp"
#include "prnuda/rng.hpp"
#include "prnuda/tape.hpp"

namespace prnuda {

struct ContrastConfig {
    double zeta = 0.1;
    int anchors_per_class = 16;
    int max_negatives = 128;
    std::uint64_t rng_seed = 0;
};

// Pixel reference into one of the two feature grids of a step (0 = source,
// 1 = target), at feature resolution.
struct PixelRef {
    std::uint8_t img = 0;
    int idx = 0;
    bool operator<(const PixelRef& o) const {
        return img != o.img ? img < o.img : idx < o.idx;
    }
    bool operator==(const PixelRef&) const = default;
};

struct PixelPairSet {
    struct Anchor {
        PixelRef ref;
        int cls = 0;
        std::vector<PixelRef> positives;  // same class, never the anchor itself
        std::vector<PixelRef> negatives;  // different class, capped
    };
    std::vector<Anchor> anchors;
    bool empty() const { return anchors.empty(); }
};

// Majority-vote label downsampling to the feature grid; ties become ignore.
LabelMap downsample_labels_majority(const LabelMap& labels, int fh, int fw);

// A feature cell is noisy if any covered pixel is noisy.
NoiseMask downsample_mask_any(const NoiseMask& m, int fh, int fw);

// Capped per-class anchor sampling over both images. Labels must already be
// at feature resolution; tgt_mask (optional) excludes noisy target pixels.
// A class with fewer than two clean pixels contributes no anchors.
PixelPairSet sample_pairs(const LabelMap& src_labels, const LabelMap& tgt_labels,
                          const NoiseMask* tgt_mask, const ContrastConfig& cfg, Rng& rng);

// Mean over anchors of -(1/|P|) sum_p log[s(a,p) / (s(a,p) + sum_n s(a,n))],
// s = exp(cos/zeta). Empty pair set yields 0 and sets *empty_flag.
double contrastive_loss(const Grid2D& feat_src, const Grid2D& feat_tgt,
                        const PixelPairSet& pairs, double zeta,
                        bool* empty_flag = nullptr);

// Tape node version; gradients flow into both feature grids.
Tape::NodeId contrastive_on(Tape& t, Tape::NodeId feat_src, Tape::NodeId feat_tgt,
                            PixelPairSet pairs, double zeta);

}  // namespace prnuda

#pragma once

#include "prnuda/model.hpp"
#include "prnuda/tape.hpp"

namespace prnuda {

// Encoder output plus the input resolution the decoder upsamples back to.
struct FeatureMap {
    Grid2D features;
    int image_h = 0;
    int image_w = 0;
};

// PRN dual heads: K-class refined logits and 1-channel pre-sigmoid noise
// logits, both at image resolution.
struct PrnOutput {
    Grid2D refined_logits;
    Grid2D noise_logits;
};

// Tape-level builders (used by the training step).
Tape::NodeId encode_on(Tape& t, const ModelState& m, Tape::NodeId x);
Tape::NodeId decode_on(Tape& t, const ModelState& m, Tape::NodeId f, int out_h, int out_w);
std::pair<Tape::NodeId, Tape::NodeId> prn_decode_on(Tape& t, const ModelState& prn,
                                                    Tape::NodeId f, Tape::NodeId l,
                                                    int out_h, int out_w);

// Inference entry points (deterministic, no gradients).
FeatureMap encode(const ModelState& m, const Grid2D& x);
Grid2D decode(const ModelState& m, const FeatureMap& f);
PrnOutput prn_decode(const ModelState& prn, const FeatureMap& f, const Grid2D& logits);

}  // namespace prnuda

#include "prnuda/network.hpp"

#include <stdexcept>

namespace prnuda {

Tape::NodeId encode_on(Tape& t, const ModelState& m, Tape::NodeId x) {
    if (m.kind != ModelKind::Segmenter)
        throw std::invalid_argument("encode: model is not a segmenter");
    if (t.value(x).channels != m.arch.in_channels)
        throw std::invalid_argument("encode: input channel mismatch");
    auto h1 = t.relu(t.conv2d(x, conv_ref(m, "enc.conv1", 2, 1)));
    auto h2 = t.relu(t.conv2d(h1, conv_ref(m, "enc.conv2", 1, 1)));
    return t.relu(t.conv2d(h2, conv_ref(m, "enc.conv3", 2, 1)));
}

Tape::NodeId decode_on(Tape& t, const ModelState& m, Tape::NodeId f, int out_h,
                       int out_w) {
    if (m.kind != ModelKind::Segmenter)
        throw std::invalid_argument("decode: model is not a segmenter");
    auto logits = t.conv2d(f, conv_ref(m, "dec.head", 1, 0));
    return t.bilinear(logits, out_h, out_w);
}

std::pair<Tape::NodeId, Tape::NodeId> prn_decode_on(Tape& t, const ModelState& prn,
                                                    Tape::NodeId f, Tape::NodeId l,
                                                    int out_h, int out_w) {
    if (prn.kind != ModelKind::PrnDecoder)
        throw std::invalid_argument("prn_decode: model is not a PRN decoder");
    const Grid2D& fv = t.value(f);
    // logits ride at the feature resolution through the trunk
    auto l_ds = t.bilinear(l, fv.height, fv.width);
    auto cat = t.concat(f, l_ds);
    auto h1 = t.relu(t.conv2d(cat, conv_ref(prn, "prn.conv1", 1, 1)));
    auto h2 = t.relu(t.conv2d(h1, conv_ref(prn, "prn.conv2", 1, 1)));
    auto seg = t.bilinear(t.conv2d(h2, conv_ref(prn, "prn.seg", 1, 0)), out_h, out_w);
    auto noise = t.bilinear(t.conv2d(h2, conv_ref(prn, "prn.noise", 1, 0)), out_h, out_w);
    return {seg, noise};
}

FeatureMap encode(const ModelState& m, const Grid2D& x) {
    Tape t(m.params, /*recording=*/false);
    auto f = encode_on(t, m, t.input(x));
    return {t.value(f), x.height, x.width};
}

Grid2D decode(const ModelState& m, const FeatureMap& f) {
    Tape t(m.params, false);
    auto l = decode_on(t, m, t.input(f.features), f.image_h, f.image_w);
    return t.value(l);
}

PrnOutput prn_decode(const ModelState& prn, const FeatureMap& f, const Grid2D& logits) {
    if (logits.channels != prn.arch.num_classes)
        throw std::invalid_argument("prn_decode: logits channel mismatch");
    Tape t(prn.params, false);
    auto [seg, noise] =
        prn_decode_on(t, prn, t.input(f.features), t.input(logits), f.image_h, f.image_w);
    return {t.value(seg), t.value(noise)};
}

}  // namespace prnuda

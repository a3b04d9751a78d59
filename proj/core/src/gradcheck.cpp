#include "prnuda/gradcheck.hpp"

#include <cmath>
#include <functional>

#include "prnuda/contrastive.hpp"
#include "prnuda/losses.hpp"
#include "prnuda/network.hpp"
#include "prnuda/rng.hpp"
#include "prnuda/selftrain.hpp"
#include "prnuda/spectral.hpp"
#include "prnuda/tape.hpp"

namespace prnuda {
namespace {

constexpr double kFdStep = 1e-5;
constexpr double kTolerance = 1e-3;

ArchDescriptor tiny_arch() {
    ArchDescriptor a;
    a.in_channels = 3;
    a.num_classes = 3;
    a.enc_w1 = 4;
    a.enc_w2 = 6;
    a.enc_w3 = 8;
    a.prn_width = 8;
    return a;
}

Grid2D random_grid(int c, int h, int w, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Grid2D g(c, h, w);
    for (double& v : g.data) v = rng.uniform(lo, hi);
    return g;
}

LabelMap random_labels(int h, int w, int k, Rng& rng) {
    LabelMap l(h, w);
    for (int& v : l.data) v = rng.uniform_int(k);
    return l;
}

NoiseMask random_mask(int h, int w, Rng& rng, double p = 0.4) {
    NoiseMask m(h, w);
    for (auto& v : m.data) v = rng.bernoulli(p) ? 1 : 0;
    return m;
}

// Blockwise norm-relative error, maxed over layout entries.
double block_rel_err(const ModelState& m, const std::vector<double>& a,
                     const std::vector<double>& f) {
    double worst = 0.0;
    for (const auto& e : m.layout) {
        double d = 0.0, na = 0.0, nf = 0.0;
        for (std::size_t i = e.offset; i < e.offset + e.count; ++i) {
            d += (a[i] - f[i]) * (a[i] - f[i]);
            na += a[i] * a[i];
            nf += f[i] * f[i];
        }
        const double rel = std::sqrt(d) / (std::sqrt(na) + std::sqrt(nf) + 1e-12);
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace

std::vector<GradCheckEntry> run_gradcheck(bool corrupt) {
    const ArchDescriptor arch = tiny_arch();
    const int H = 8, W = 8;
    Rng rng(20240515);

    ModelState student = make_model(arch, ModelKind::Segmenter, 11);
    ModelState prn = make_model(arch, ModelKind::PrnDecoder, 13);

    const Grid2D x_src = random_grid(3, H, W, rng, 0.0, 1.0);
    const Grid2D x_tgt = random_grid(3, H, W, rng, 0.0, 1.0);
    const LabelMap y_src = random_labels(H, W, arch.num_classes, rng);
    const LabelMap y_ref = random_labels(H, W, arch.num_classes, rng);
    const NoiseMask clean_mask = random_mask(H, W, rng, 0.3);
    const NoiseMask mu_gt = random_mask(H, W, rng, 0.35);
    const double eta = 0.7;

    // fixed detached inputs for the PRN cases
    ModelState feat_model = make_model(arch, ModelKind::Segmenter, 17);
    const FeatureMap feat = encode(feat_model, x_src);
    const Grid2D pert = random_grid(arch.num_classes, H, W, rng, -2.0, 2.0);

    // pair set for the contrastive case (labels at feature resolution)
    const int fh = feat.features.height, fw = feat.features.width;
    ContrastConfig ccfg;
    ccfg.anchors_per_class = 4;
    ccfg.max_negatives = 8;
    Rng pair_rng(99);
    const LabelMap ds_src = random_labels(fh, fw, arch.num_classes, pair_rng);
    const LabelMap ds_tgt = random_labels(fh, fw, arch.num_classes, pair_rng);
    const PixelPairSet pairs = sample_pairs(ds_src, ds_tgt, nullptr, ccfg, pair_rng);
    const double zeta = 0.1;

    // gate weights for the Eq.-12 case
    PseudoLabelBundle ref;
    ref.labels = y_ref;
    ref.max_prob = random_grid(1, H, W, rng, 0.0, 1.0);
    ref.noise_mask = clean_mask;
    ref.has_noise_mask = true;
    PrnGateConfig gate{0.5, 100, true};

    struct Case {
        std::string name;
        const ModelState* model;
        std::function<Tape::NodeId(Tape&, const ModelState&)> node;
    };

    auto student_ce_src = [&](Tape& t, const ModelState& m) {
        auto f = encode_on(t, m, t.input(x_src));
        auto l = decode_on(t, m, f, H, W);
        return t.softmax_ce(l, y_src, std::vector<double>(y_src.size(), 1.0),
                            static_cast<double>(H * W));
    };
    auto student_ce_tgt = [&](Tape& t, const ModelState& m) {
        auto f = encode_on(t, m, t.input(x_tgt));
        auto l = decode_on(t, m, f, H, W);
        std::vector<double> w(y_ref.size(), 0.0);
        long n = 0;
        for (std::size_t j = 0; j < w.size(); ++j)
            if (!clean_mask.data[j]) {
                w[j] = eta;
                ++n;
            }
        return t.softmax_ce(l, y_ref, std::move(w), static_cast<double>(n));
    };
    auto student_contrastive = [&](Tape& t, const ModelState& m) {
        auto fs = encode_on(t, m, t.input(x_src));
        auto ft = encode_on(t, m, t.input(x_tgt));
        return contrastive_on(t, fs, ft, pairs, zeta);
    };
    auto prn_forward = [&](Tape& t, const ModelState& m) {
        return prn_decode_on(t, m, t.input(feat.features), t.input(pert), H, W);
    };
    auto prn_src_ce = [&](Tape& t, const ModelState& m) {
        auto [seg, noise] = prn_forward(t, m);
        (void)noise;
        return t.softmax_ce(seg, y_src, std::vector<double>(y_src.size(), 1.0),
                            static_cast<double>(H * W));
    };
    auto prn_src_bce = [&](Tape& t, const ModelState& m) {
        auto [seg, noise] = prn_forward(t, m);
        (void)seg;
        return t.sigmoid_bce(noise, mu_gt, static_cast<double>(mu_gt.size()));
    };
    auto prn_tgt_ce = [&](Tape& t, const ModelState& m) {
        auto [seg, noise] = prn_forward(t, m);
        (void)noise;
        std::vector<double> w = prn_gate_weights(ref, /*step=*/200, gate);
        long n = 0;
        for (double v : w) n += (v > 0.0);
        return t.softmax_ce(seg, y_ref, std::move(w), static_cast<double>(std::max(1L, n)));
    };
    auto prn_tgt_bce = [&](Tape& t, const ModelState& m) {
        auto [seg, noise] = prn_forward(t, m);
        (void)seg;
        return t.sigmoid_bce(noise, mu_gt, static_cast<double>(mu_gt.size()));
    };

    std::vector<Case> cases = {
        {"source_ce", &student, student_ce_src},
        {"target_ce", &student, student_ce_tgt},
        {"contrastive", &student, student_contrastive},
        {"prn_source_ce", &prn, prn_src_ce},
        {"prn_source_bce", &prn, prn_src_bce},
        {"prn_target_ce", &prn, prn_tgt_ce},
        {"prn_target_bce", &prn, prn_tgt_bce},
    };

    std::vector<GradCheckEntry> out;
    bool first = true;
    for (const auto& c : cases) {
        ModelState work = *c.model;

        std::vector<double> analytic;
        {
            Tape t(work.params, /*recording=*/true);
            auto loss = c.node(t, work);
            t.backward(loss, analytic);
        }
        if (corrupt && first) analytic[0] += 0.01;
        first = false;

        std::vector<double> fd(work.params.size(), 0.0);
        for (std::size_t i = 0; i < work.params.size(); ++i) {
            const double keep = work.params[i];
            work.params[i] = keep + kFdStep;
            double fp;
            {
                Tape t(work.params, false);
                fp = t.scalar(c.node(t, work));
            }
            work.params[i] = keep - kFdStep;
            double fm;
            {
                Tape t(work.params, false);
                fm = t.scalar(c.node(t, work));
            }
            work.params[i] = keep;
            fd[i] = (fp - fm) / (2.0 * kFdStep);
        }

        GradCheckEntry e;
        e.loss_name = c.name;
        e.max_rel_err = block_rel_err(work, analytic, fd);
        e.pass = e.max_rel_err < kTolerance;
        out.push_back(e);
    }
    return out;
}

}  // namespace prnuda

#include "prnuda/selftrain.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "prnuda/augment.hpp"
#include "prnuda/contrastive.hpp"
#include "prnuda/numerics.hpp"
#include "prnuda/rng.hpp"
#include "prnuda/spectral.hpp"

namespace prnuda {
namespace {

// per-(step, purpose) RNG streams; ablation switches must not shift each
// other's draws
enum class Stream : std::uint64_t {
    Eps = 1,
    Jitter = 2,
    Blur = 3,
    ClassMix = 4,
    Contrast = 5,
    Batch = 6,
};

Rng step_rng(std::uint64_t seed, long step, Stream s) {
    return Rng(Rng::mix(Rng::mix(seed, static_cast<std::uint64_t>(step)),
                        static_cast<std::uint64_t>(s)));
}

long count_valid(const LabelMap& y) {
    long n = 0;
    for (int v : y.data) n += (v != kIgnoreLabel);
    return n;
}

NoiseMask threshold_noise_logits(const Grid2D& noise_logits) {
    NoiseMask m(noise_logits.height, noise_logits.width);
    for (std::size_t j = 0; j < m.size(); ++j)
        m.data[j] = noise_logits.data[j] > 0.0 ? 1 : 0;  // sigmoid(z) > 0.5
    return m;
}

}  // namespace

TeacherState make_teacher(const ModelState& student, double beta) {
    return {student, beta};
}

TeacherState ema_update(const TeacherState& t, const ModelState& student) {
    if (!t.model.compatible(student))
        throw std::invalid_argument("ema_update: arch mismatch");
    TeacherState out = t;
    const double b = t.beta;
    for (std::size_t i = 0; i < out.model.params.size(); ++i)
        out.model.params[i] = b * t.model.params[i] + (1.0 - b) * student.params[i];
    return out;
}

LabelMap pseudo_label(const TeacherState& t, const Grid2D& x) {
    FeatureMap f = encode(t.model, x);
    return argmax_labels(decode(t.model, f));
}

PseudoLabelBundle refine_pseudo_labels(const TeacherState& t, const ModelState& prn,
                                       const Grid2D& x_tgt, bool use_noise_mask,
                                       double tau1) {
    FeatureMap f = encode(t.model, x_tgt);
    Grid2D logits = decode(t.model, f);
    PrnOutput out = prn_decode(prn, f, logits);

    PseudoLabelBundle b;
    b.labels = argmax_labels(out.refined_logits);
    b.max_prob = max_softmax(out.refined_logits);
    if (use_noise_mask) {
        b.noise_mask = threshold_noise_logits(out.noise_logits);
        b.has_noise_mask = true;
        b.confidence = confidence_mask(b.noise_mask);
    } else {
        b.confidence = confidence_threshold(softmax_channels(out.refined_logits), tau1);
    }
    return b;
}

PseudoLabelBundle teacher_bundle(const TeacherState& t, const Grid2D& x_tgt,
                                 double tau1) {
    FeatureMap f = encode(t.model, x_tgt);
    Grid2D logits = decode(t.model, f);
    PseudoLabelBundle b;
    b.labels = argmax_labels(logits);
    b.max_prob = max_softmax(logits);
    b.confidence = confidence_threshold(softmax_channels(logits), tau1);
    return b;
}

std::vector<double> prn_gate_weights(const PseudoLabelBundle& ref, long step,
                                     const PrnGateConfig& cfg) {
    std::vector<double> w(ref.labels.size(), 0.0);
    const bool warm = step < cfg.warmup_steps || !cfg.use_predicted_mask ||
                      !ref.has_noise_mask;
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (warm) {
            if (ref.max_prob.data[j] >= cfg.tau2) w[j] = 1.0;
        } else {
            if (ref.noise_mask.data[j] == 0) w[j] = 1.0;
        }
    }
    return w;
}

std::pair<double, double> prn_target_losses(const PrnOutput& out,
                                            const PseudoLabelBundle& ref,
                                            const NoiseMask& mu_gt, long step,
                                            const PrnGateConfig& cfg) {
    if (out.refined_logits.plane() != ref.labels.size())
        throw std::invalid_argument("prn_target_losses: shape mismatch");
    const std::vector<double> w = prn_gate_weights(ref, step, cfg);
    long selected = 0;
    for (std::size_t j = 0; j < w.size(); ++j)
        selected += (w[j] > 0.0 && ref.labels.data[j] != kIgnoreLabel);

    double ce = 0.0;
    if (selected > 0) {
        NoiseMask drop(ref.labels.height, ref.labels.width);
        for (std::size_t j = 0; j < w.size(); ++j) drop.data[j] = w[j] > 0.0 ? 0 : 1;
        ce = ce_target(out.refined_logits, ref.labels, drop, 1.0).mean;
    }
    const double bce = bce_mean(out.noise_logits, mu_gt);
    return {ce, bce};
}

TrainerState make_trainer(const RunConfig& cfg) {
    cfg.validate();
    TrainerState s;
    s.student = make_model(cfg.arch(), ModelKind::Segmenter, cfg.seed);
    s.teacher = make_teacher(s.student, cfg.ema_beta);
    s.prn = make_model(cfg.arch(), ModelKind::PrnDecoder, Rng::mix(cfg.seed, 0x70726eULL));
    s.opt_student = OptimState(s.student.params.size());
    s.opt_prn = OptimState(s.prn.params.size());
    return s;
}

LossReport train_step(TrainerState& state, const StepBatch& batch, const RunConfig& cfg) {
    const long step = state.step;
    const int H = batch.tgt_image->height, W = batch.tgt_image->width;
    const AblationSwitches& sw = cfg.sw;
    LossReport report;

    // FA translation of the source image (style only, labels unchanged)
    const Grid2D* src_img = batch.src_image;
    Grid2D src_translated;
    if (sw.fa) {
        src_translated = fda_image(*batch.src_image, *batch.tgt_image, cfg.fa_eps);
        src_img = &src_translated;
    }

    // Teacher inference on the clean target + pseudo-label bundles. The PRN
    // reference bundle (Eq.-12 supervision) exists from step 0; the student
    // only consumes refined labels once the warm-up is over — before that the
    // refinement decoder has no reason to be trusted.
    const bool trust_prn = sw.prn && step >= cfg.effective_warmup();
    FeatureMap teacher_feat;
    Grid2D teacher_logits;
    PseudoLabelBundle refined_bundle;  // PRN on unperturbed teacher logits
    PseudoLabelBundle bundle;          // what supervises the student
    if (sw.st) {
        teacher_feat = encode(state.teacher.model, *batch.tgt_image);
        teacher_logits = decode(state.teacher.model, teacher_feat);
        if (sw.prn) {
            PrnOutput refined = prn_decode(state.prn, teacher_feat, teacher_logits);
            refined_bundle.labels = argmax_labels(refined.refined_logits);
            refined_bundle.max_prob = max_softmax(refined.refined_logits);
            if (sw.nm) {
                refined_bundle.noise_mask = threshold_noise_logits(refined.noise_logits);
                refined_bundle.has_noise_mask = true;
                refined_bundle.confidence = confidence_mask(refined_bundle.noise_mask);
            } else {
                refined_bundle.confidence = confidence_threshold(
                    softmax_channels(refined.refined_logits), cfg.tau1);
            }
        }
        if (trust_prn) {
            bundle = refined_bundle;
        } else {
            bundle.labels = argmax_labels(teacher_logits);
            bundle.max_prob = max_softmax(teacher_logits);
            bundle.confidence =
                confidence_threshold(softmax_channels(teacher_logits), cfg.tau1);
        }
        report.eta_bar = bundle.confidence;
        if (bundle.has_noise_mask)
            report.noise_density = 1.0 - confidence_mask(bundle.noise_mask);
    }

    // Target-stream augmentation: mask-guided repair, then ClassMix, then
    // photometric augs on the mixed image
    Grid2D work_img;
    LabelMap work_lbl;
    NoiseMask source_origin;
    if (sw.st) {
        work_img = *batch.tgt_image;
        work_lbl = bundle.labels;
        source_origin = NoiseMask(H, W);
        if (trust_prn && sw.nm) {
            MixResult r = mask_guided_mix(work_img, work_lbl, bundle.noise_mask, *src_img,
                                          *batch.src_label);
            work_img = std::move(r.image);
            work_lbl = std::move(r.labels);
            source_origin = std::move(r.source_origin);
        }
        {
            Rng rng = step_rng(cfg.seed, step, Stream::ClassMix);
            MixResult r = classmix(*src_img, *batch.src_label, work_img, work_lbl,
                                   cfg.classmix_fraction, rng);
            work_img = std::move(r.image);
            work_lbl = std::move(r.labels);
            for (std::size_t j = 0; j < source_origin.size(); ++j)
                source_origin.data[j] |= r.source_origin.data[j];
        }
        {
            Rng rng = step_rng(cfg.seed, step, Stream::Jitter);
            if (rng.bernoulli(cfg.jitter_prob))
                work_img = color_jitter(work_img, cfg.jitter_strength, rng);
        }
        {
            Rng rng = step_rng(cfg.seed, step, Stream::Blur);
            if (rng.bernoulli(cfg.blur_prob))
                work_img = gaussian_blur(work_img,
                                         rng.uniform(cfg.blur_sigma_min, cfg.blur_sigma_max));
        }
    }

    // ---- student objective ----
    Tape st_tape(state.student.params);
    const auto x_src = st_tape.input(*src_img);
    const auto f_src = encode_on(st_tape, state.student, x_src);
    const auto l_src = decode_on(st_tape, state.student, f_src,
                                 batch.src_image->height, batch.src_image->width);

    std::vector<std::pair<Tape::NodeId, double>> student_terms;
    const long src_valid = count_valid(*batch.src_label);
    Tape::NodeId loss_src =
        src_valid > 0
            ? st_tape.softmax_ce(l_src, *batch.src_label,
                                 std::vector<double>(batch.src_label->size(), 1.0),
                                 static_cast<double>(src_valid))
            : st_tape.scalar_input(0.0);

    Tape::NodeId loss_tgt = st_tape.scalar_input(0.0);
    Tape::NodeId loss_con = st_tape.scalar_input(0.0);
    Tape::NodeId f_tgt = -1;
    if (sw.st) {
        const auto x_tgt = st_tape.input(work_img);
        f_tgt = encode_on(st_tape, state.student, x_tgt);
        const auto l_tgt = decode_on(st_tape, state.student, f_tgt, H, W);
        const long tgt_valid = count_valid(work_lbl);
        if (tgt_valid > 0)
            loss_tgt = st_tape.softmax_ce(l_tgt, work_lbl,
                                          mix_weights(source_origin, bundle.confidence),
                                          static_cast<double>(tgt_valid));
        if (sw.cl) {
            const Grid2D& fv = st_tape.value(f_src);
            ContrastConfig ccfg;
            ccfg.zeta = cfg.zeta;
            ccfg.anchors_per_class = cfg.anchors_per_class;
            ccfg.max_negatives = cfg.max_negatives;
            LabelMap ds_src =
                downsample_labels_majority(*batch.src_label, fv.height, fv.width);
            LabelMap ds_tgt = downsample_labels_majority(work_lbl, fv.height, fv.width);
            NoiseMask ds_mask;
            const NoiseMask* mask_ptr = nullptr;
            if (bundle.has_noise_mask) {
                // pasted source pixels carry GT labels; only target-origin
                // pixels can be noisy
                NoiseMask eff(H, W);
                for (std::size_t j = 0; j < eff.size(); ++j)
                    eff.data[j] = bundle.noise_mask.data[j] && !source_origin.data[j];
                ds_mask = downsample_mask_any(eff, fv.height, fv.width);
                mask_ptr = &ds_mask;
            }
            Rng rng = step_rng(cfg.seed, step, Stream::Contrast);
            PixelPairSet pairs = sample_pairs(ds_src, ds_tgt, mask_ptr, ccfg, rng);
            if (!pairs.empty())
                loss_con = contrastive_on(st_tape, f_src, f_tgt, std::move(pairs), cfg.zeta);
        }
    }
    student_terms = {{loss_tgt, 1.0}, {loss_src, 1.0}, {loss_con, cfg.lambda1}};
    const auto student_total = st_tape.weighted_sum(student_terms);

    report.source_ce = st_tape.scalar(loss_src);
    report.target_ce = st_tape.scalar(loss_tgt);
    report.contrastive = st_tape.scalar(loss_con);
    report.total_student = st_tape.scalar(student_total);

    std::vector<double> grad_student;
    st_tape.backward(student_total, grad_student);

    // ---- PRN objective (student and teacher held fixed: inputs detached) ----
    std::vector<double> grad_prn;
    if (sw.st && sw.prn) {
        Rng rng = step_rng(cfg.seed, step, Stream::Eps);
        const double eps = rng.uniform(cfg.prn_eps_min, cfg.prn_eps_max);

        const Grid2D l_src_det = st_tape.value(l_src);
        double res_s = 0.0, res_t = 0.0;
        Grid2D pert_src = perturb_logits(l_src_det, teacher_logits, eps, &res_s);
        Grid2D pert_tgt = perturb_logits(teacher_logits, l_src_det, eps, &res_t);
        report.perturb_residue = std::max(res_s, res_t);
        NoiseMask mu_src_gt = make_noise_mask_gt(l_src_det, pert_src);
        NoiseMask mu_tgt_gt = make_noise_mask_gt(teacher_logits, pert_tgt);

        Tape prn_tape(state.prn.params);
        // source pass: student encoder features (equation path), target pass:
        // teacher encoder features (text path); both detached
        const auto pf_src = prn_tape.input(st_tape.value(f_src));
        const auto pf_tgt = prn_tape.input(teacher_feat.features);
        auto [seg_s, noise_s] = prn_decode_on(prn_tape, state.prn, pf_src,
                                              prn_tape.input(pert_src), H, W);
        auto [seg_t, noise_t] = prn_decode_on(prn_tape, state.prn, pf_tgt,
                                              prn_tape.input(pert_tgt), H, W);

        Tape::NodeId rs_ce =
            src_valid > 0
                ? prn_tape.softmax_ce(seg_s, *batch.src_label,
                                      std::vector<double>(batch.src_label->size(), 1.0),
                                      static_cast<double>(src_valid))
                : prn_tape.scalar_input(0.0);
        Tape::NodeId rs_bce = sw.nm
                                  ? prn_tape.sigmoid_bce(noise_s, mu_src_gt,
                                                         static_cast<double>(mu_src_gt.size()))
                                  : prn_tape.scalar_input(0.0);

        PrnGateConfig gate{cfg.tau2, cfg.effective_warmup(), sw.nm};
        std::vector<double> gw = prn_gate_weights(bundle, step, gate);
        long selected = 0;
        for (std::size_t j = 0; j < gw.size(); ++j)
            selected += (gw[j] > 0.0 && bundle.labels.data[j] != kIgnoreLabel);
        Tape::NodeId rt_ce = selected > 0
                                 ? prn_tape.softmax_ce(seg_t, bundle.labels, std::move(gw),
                                                       static_cast<double>(selected))
                                 : prn_tape.scalar_input(0.0);
        Tape::NodeId rt_bce = sw.nm
                                  ? prn_tape.sigmoid_bce(noise_t, mu_tgt_gt,
                                                         static_cast<double>(mu_tgt_gt.size()))
                                  : prn_tape.scalar_input(0.0);

        const auto prn_total = prn_tape.weighted_sum(
            {{rs_ce, cfg.lambda2}, {rs_bce, cfg.lambda2}, {rt_ce, 1.0}, {rt_bce, 1.0}});

        report.prn_source_ce = prn_tape.scalar(rs_ce);
        report.prn_source_bce = prn_tape.scalar(rs_bce);
        report.prn_target_ce = prn_tape.scalar(rt_ce);
        report.prn_target_bce = prn_tape.scalar(rt_bce);
        report.total_prn = prn_tape.scalar(prn_total);

        prn_tape.backward(prn_total, grad_prn);
    }

    if (!report.finite()) {
        std::ostringstream os;
        os << "train_step: non-finite loss at step " << step << ", batch "
           << batch.batch_id << " (src=" << report.source_ce << " tgt=" << report.target_ce
           << " con=" << report.contrastive << " prn=" << report.total_prn << ")";
        throw std::runtime_error(os.str());
    }

    // ---- two optimizer steps on disjoint parameter sets, then EMA ----
    LrSchedule sched{cfg.effective_warmup(), cfg.total_steps, cfg.warmup_factor};
    const double lr_e = lr_at(step, cfg.lr_encoder, sched);
    const double lr_d = lr_at(step, cfg.lr_decoder, sched);
    AdamWConfig adam{cfg.adam_beta1, cfg.adam_beta2, 1e-8, cfg.weight_decay};

    const auto groups = param_groups(state.student);
    adamw_step(state.student.params, grad_student, state.opt_student,
               {{groups[0].offset, groups[0].count, lr_e},
                {groups[1].offset, groups[1].count, lr_d}},
               adam);
    if (!grad_prn.empty())
        adamw_step(state.prn.params, grad_prn, state.opt_prn, lr_d, adam);

    if (sw.st) state.teacher = ema_update(state.teacher, state.student);
    state.step += 1;
    return report;
}

}  // namespace prnuda

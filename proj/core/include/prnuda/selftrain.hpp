#pragma once

#include "prnuda/config.hpp"
#include "prnuda/losses.hpp"
#include "prnuda/model.hpp"
#include "prnuda/network.hpp"
#include "prnuda/optimizer.hpp"

namespace prnuda {

// EMA copy of the student; never touched by any optimizer.
struct TeacherState {
    ModelState model;
    double beta = 0.999;
};

TeacherState make_teacher(const ModelState& student, double beta);

// phi <- beta * phi + (1 - beta) * theta, elementwise.
TeacherState ema_update(const TeacherState& t, const ModelState& student);

// argmax over teacher logits; no gradients involved.
LabelMap pseudo_label(const TeacherState& t, const Grid2D& x);

// Refined (or raw) pseudo labels for one target image, plus the per-image
// confidence estimate and optional predicted noise mask.
struct PseudoLabelBundle {
    LabelMap labels;
    double confidence = 0.0;
    NoiseMask noise_mask;
    bool has_noise_mask = false;
    Grid2D max_prob;  // 1×H×W max softmax of the logits behind `labels`
};

// PRN on unperturbed teacher logits (teacher encoder features, Fig.-1 path).
// use_noise_mask=false falls back to the threshold estimate on the refined
// probabilities and leaves the mask unset.
PseudoLabelBundle refine_pseudo_labels(const TeacherState& t, const ModelState& prn,
                                       const Grid2D& x_tgt, bool use_noise_mask,
                                       double tau1);

// Plain-teacher bundle (PRN disabled): labels = argmax teacher, confidence =
// threshold estimate with tau1.
PseudoLabelBundle teacher_bundle(const TeacherState& t, const Grid2D& x_tgt, double tau1);

struct PrnGateConfig {
    double tau2 = 0.968;
    long warmup_steps = 1500;
    bool use_predicted_mask = true;  // post-warm-up gating by ref noise mask
};

// (CE of refined logits vs ref labels gated per warm-up rule, BCE vs mu_gt).
// During warm-up the CE counts pixels whose reference max-softmax >= tau2;
// afterwards pixels the reference bundle predicts clean.
std::pair<double, double> prn_target_losses(const PrnOutput& out,
                                            const PseudoLabelBundle& ref,
                                            const NoiseMask& mu_gt, long step,
                                            const PrnGateConfig& cfg);

// Pixel selection weights for the gated CE above (1 selected / 0 dropped),
// shared between the value-level loss and the training tape.
std::vector<double> prn_gate_weights(const PseudoLabelBundle& ref, long step,
                                     const PrnGateConfig& cfg);

struct TrainerState {
    ModelState student;
    TeacherState teacher;
    ModelState prn;
    OptimState opt_student;
    OptimState opt_prn;
    long step = 0;
};

TrainerState make_trainer(const RunConfig& cfg);

struct StepBatch {
    const Grid2D* src_image = nullptr;
    const LabelMap* src_label = nullptr;
    const Grid2D* tgt_image = nullptr;
    long batch_id = 0;
};

// One full training step per Figs. 1-2: FA translation, teacher inference,
// PRN refinement, noise-mask-guided + ClassMix augmentation, student losses,
// perturbed-logit construction, PRN losses, two optimizer steps on disjoint
// parameter sets, EMA update. Throws on non-finite losses.
LossReport train_step(TrainerState& state, const StepBatch& batch, const RunConfig& cfg);

}  // namespace prnuda

#pragma once

#include <utility>

#include "prnuda/grid.hpp"
#include "prnuda/network.hpp"

namespace prnuda {

// Cross-entropy reported both as a sum over counted pixels and as the
// per-pixel mean actually used inside the training objective.
struct CeResult {
    double sum = 0.0;
    double mean = 0.0;
    long pixels = 0;
};

// CE over non-ignore pixels. Throws if a label is >= K (and not ignore).
CeResult ce_source(const Grid2D& logits, const LabelMap& y);

// Eq.-4-style masked CE: mean over pixels with m = 0 (and non-ignore label),
// scaled by the confidence estimate eta. Zero when no clean pixels remain.
CeResult ce_target(const Grid2D& logits, const LabelMap& y_ref, const NoiseMask& m,
                   double eta);

// Mean stable BCE of sigmoid(noise_logits) against a 0/1 mask, over all pixels.
double bce_mean(const Grid2D& noise_logits, const NoiseMask& target);

// (CE of refined logits vs GT labels, BCE of noise head vs GT mask), means.
std::pair<double, double> prn_source_losses(const PrnOutput& out, const LabelMap& y_gt,
                                            const NoiseMask& mu_gt);

// Fraction of pixels whose max softmax probability exceeds tau1 (Eq. 5).
double confidence_threshold(const Grid2D& probs, double tau1);

// Fraction of pixels with mask value 0 (Eq. 6) — no threshold involved.
double confidence_mask(const NoiseMask& m);

// Scalar summary of one training step; the totals always satisfy the
// weighted-sum identities checked by total_losses.
struct LossReport {
    double source_ce = 0.0;
    double target_ce = 0.0;
    double contrastive = 0.0;
    double prn_source_ce = 0.0;
    double prn_source_bce = 0.0;
    double prn_target_ce = 0.0;
    double prn_target_bce = 0.0;
    double total_student = 0.0;
    double total_prn = 0.0;
    // logging extras
    double eta_bar = 0.0;
    double noise_density = 0.0;
    double perturb_residue = 0.0;

    bool finite() const;
};

// student = L_ce^T + L_ce^S + l1*L_con ; prn = l2*(L_ce^RS + L_bce^RS) +
// L_ce^RT + L_bce^RT.
std::pair<double, double> total_losses(const LossReport& parts, double lambda1,
                                       double lambda2);

}  // namespace prnuda

#include "prnuda/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "prnuda/numerics.hpp"

namespace prnuda {
namespace {

CeResult ce_masked(const Grid2D& logits, const LabelMap& y, const NoiseMask* mask,
                   double scale) {
    const int k = logits.channels;
    const std::size_t plane = logits.plane();
    if (y.size() != plane) throw std::invalid_argument("ce: label shape mismatch");
    if (mask && mask->size() != plane)
        throw std::invalid_argument("ce: mask shape mismatch");
    CeResult r;
    for (std::size_t j = 0; j < plane; ++j) {
        const int label = y.data[j];
        if (label == kIgnoreLabel) continue;
        if (label < 0 || label >= k)
            throw std::invalid_argument("ce: label out of range");
        if (mask && mask->data[j]) continue;
        double m = logits.data[j];
        for (int c = 1; c < k; ++c) m = std::max(m, logits.data[c * plane + j]);
        double sum = 0.0;
        for (int c = 0; c < k; ++c) sum += std::exp(logits.data[c * plane + j] - m);
        const double logp = logits.data[label * plane + j] - m - std::log(sum);
        r.sum -= logp;
        r.pixels += 1;
    }
    r.sum *= scale;
    r.mean = (r.pixels > 0) ? r.sum / static_cast<double>(r.pixels) : 0.0;
    return r;
}

}  // namespace

CeResult ce_source(const Grid2D& logits, const LabelMap& y) {
    return ce_masked(logits, y, nullptr, 1.0);
}

CeResult ce_target(const Grid2D& logits, const LabelMap& y_ref, const NoiseMask& m,
                   double eta) {
    return ce_masked(logits, y_ref, &m, eta);
}

double bce_mean(const Grid2D& noise_logits, const NoiseMask& target) {
    if (noise_logits.channels != 1 || noise_logits.plane() != target.size())
        throw std::invalid_argument("bce_mean: shape mismatch");
    double loss = 0.0;
    for (std::size_t j = 0; j < target.size(); ++j) {
        const double z = noise_logits.data[j];
        const double t = target.data[j] ? 1.0 : 0.0;
        loss += std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
    }
    return loss / static_cast<double>(target.size());
}

std::pair<double, double> prn_source_losses(const PrnOutput& out, const LabelMap& y_gt,
                                            const NoiseMask& mu_gt) {
    CeResult ce = ce_source(out.refined_logits, y_gt);
    double bce = bce_mean(out.noise_logits, mu_gt);
    return {ce.mean, bce};
}

double confidence_threshold(const Grid2D& probs, double tau1) {
    if (!(tau1 > 0.0 && tau1 < 1.0))
        throw std::invalid_argument("confidence_threshold: tau1 must be in (0,1)");
    const std::size_t plane = probs.plane();
    std::size_t hits = 0;
    for (std::size_t j = 0; j < plane; ++j) {
        double m = probs.data[j];
        for (int c = 1; c < probs.channels; ++c)
            m = std::max(m, probs.data[c * plane + j]);
        if (m > tau1) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(plane);
}

double confidence_mask(const NoiseMask& m) {
    if (m.size() == 0) return 0.0;
    return static_cast<double>(m.size() - m.count_ones()) /
           static_cast<double>(m.size());
}

bool LossReport::finite() const {
    for (double v : {source_ce, target_ce, contrastive, prn_source_ce, prn_source_bce,
                     prn_target_ce, prn_target_bce, total_student, total_prn})
        if (!std::isfinite(v)) return false;
    return true;
}

std::pair<double, double> total_losses(const LossReport& parts, double lambda1,
                                       double lambda2) {
    const double student = parts.target_ce + parts.source_ce + lambda1 * parts.contrastive;
    const double prn = lambda2 * (parts.prn_source_ce + parts.prn_source_bce) +
                       parts.prn_target_ce + parts.prn_target_bce;
    return {student, prn};
}

}  // namespace prnuda

#include "prnuda/contrastive.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

namespace prnuda {
namespace {

struct FeatView {
    const Grid2D* g[2];
    int dim() const { return g[0]->channels; }
    std::size_t plane(int img) const { return g[img]->plane(); }
    double comp(const PixelRef& r, int c) const {
        return g[r.img]->data[static_cast<std::size_t>(c) * plane(r.img) + r.idx];
    }
};

double norm_of(const FeatView& f, const PixelRef& r) {
    double s = 0.0;
    for (int c = 0; c < f.dim(); ++c) {
        double v = f.comp(r, c);
        s += v * v;
    }
    return std::sqrt(s);
}

double dot_of(const FeatView& f, const PixelRef& a, const PixelRef& b) {
    double s = 0.0;
    for (int c = 0; c < f.dim(); ++c) s += f.comp(a, c) * f.comp(b, c);
    return s;
}

double cos_of(const FeatView& f, const PixelRef& a, const PixelRef& b) {
    const double na = norm_of(f, a), nb = norm_of(f, b);
    return dot_of(f, a, b) / std::max(na * nb, 1e-24);
}

// d cos(u,v) / d u = v/(|u||v|) - cos * u/|u|^2 ; scatter coef * that into du.
void accum_cos_grad(const FeatView& f, const PixelRef& u, const PixelRef& v,
                    double cosuv, double coef, Grid2D* dg[2]) {
    const double nu = std::max(norm_of(f, u), 1e-12);
    const double nv = std::max(norm_of(f, v), 1e-12);
    const std::size_t pu = f.plane(u.img), pv = f.plane(v.img);
    for (int c = 0; c < f.dim(); ++c) {
        const double fu = f.comp(u, c), fv = f.comp(v, c);
        dg[u.img]->data[static_cast<std::size_t>(c) * pu + u.idx] +=
            coef * (fv / (nu * nv) - cosuv * fu / (nu * nu));
        dg[v.img]->data[static_cast<std::size_t>(c) * pv + v.idx] +=
            coef * (fu / (nu * nv) - cosuv * fv / (nv * nv));
    }
}

// Forward value plus, when dg is non-null, gradients w.r.t. both feature grids.
double loss_core(const FeatView& f, const PixelPairSet& pairs, double zeta,
                 Grid2D* dg[2]) {
    if (pairs.anchors.empty()) return 0.0;
    double total = 0.0;
    const double inv_anchors = 1.0 / static_cast<double>(pairs.anchors.size());
    for (const auto& a : pairs.anchors) {
        if (a.positives.empty()) continue;
        const double inv_pos = 1.0 / static_cast<double>(a.positives.size());
        std::vector<double> cn(a.negatives.size());
        double m = -1e300;
        for (std::size_t i = 0; i < a.negatives.size(); ++i) {
            cn[i] = cos_of(f, a.ref, a.negatives[i]) / zeta;
            m = std::max(m, cn[i]);
        }
        std::vector<double> pin(a.negatives.size(), 0.0);  // accumulated dL/dc_n
        double anchor_loss = 0.0;
        for (const auto& p : a.positives) {
            const double cp = cos_of(f, a.ref, p) / zeta;
            if (a.negatives.empty()) {
                // -log(s/s) = 0, gradient vanishes
                continue;
            }
            const double mm = std::max(m, cp);
            double s_neg = 0.0;
            for (double c : cn) s_neg += std::exp(c - mm);
            const double denom = std::exp(cp - mm) + s_neg;
            anchor_loss += std::log(denom) + mm - cp;
            if (dg) {
                const double coef = inv_anchors * inv_pos;
                const double pi_p = std::exp(cp - mm) / denom;
                accum_cos_grad(f, a.ref, p, cp * zeta, coef * (pi_p - 1.0) / zeta, dg);
                for (std::size_t i = 0; i < cn.size(); ++i)
                    pin[i] += coef * (std::exp(cn[i] - mm) / denom) / zeta;
            }
        }
        if (dg)
            for (std::size_t i = 0; i < cn.size(); ++i)
                if (pin[i] != 0.0)
                    accum_cos_grad(f, a.ref, a.negatives[i], cn[i] * zeta, pin[i], dg);
        total += anchor_loss * inv_pos;
    }
    return total * inv_anchors;
}

std::vector<PixelRef> sample_without_replacement(std::vector<PixelRef> pool, int n,
                                                 Rng& rng) {
    std::vector<PixelRef> out;
    const int take = std::min<int>(n, static_cast<int>(pool.size()));
    out.reserve(take);
    for (int i = 0; i < take; ++i) {
        int j = rng.uniform_int(static_cast<int>(pool.size()));
        out.push_back(pool[j]);
        pool[j] = pool.back();
        pool.pop_back();
    }
    return out;
}

}  // namespace

LabelMap downsample_labels_majority(const LabelMap& labels, int fh, int fw) {
    LabelMap out(fh, fw, kIgnoreLabel);
    for (int fy = 0; fy < fh; ++fy) {
        const int y0 = fy * labels.height / fh;
        const int y1 = (fy + 1) * labels.height / fh;
        for (int fx = 0; fx < fw; ++fx) {
            const int x0 = fx * labels.width / fw;
            const int x1 = (fx + 1) * labels.width / fw;
            std::map<int, int> counts;
            for (int y = y0; y < std::max(y1, y0 + 1); ++y)
                for (int x = x0; x < std::max(x1, x0 + 1); ++x)
                    counts[labels.at(std::min(y, labels.height - 1),
                                     std::min(x, labels.width - 1))]++;
            int best = kIgnoreLabel, best_n = 0;
            bool tie = false;
            for (const auto& [lbl, n] : counts) {
                if (n > best_n) {
                    best = lbl;
                    best_n = n;
                    tie = false;
                } else if (n == best_n) {
                    tie = true;
                }
            }
            out.at(fy, fx) = tie ? kIgnoreLabel : best;
        }
    }
    return out;
}

NoiseMask downsample_mask_any(const NoiseMask& m, int fh, int fw) {
    NoiseMask out(fh, fw);
    for (int fy = 0; fy < fh; ++fy) {
        const int y0 = fy * m.height / fh;
        const int y1 = std::max((fy + 1) * m.height / fh, y0 + 1);
        for (int fx = 0; fx < fw; ++fx) {
            const int x0 = fx * m.width / fw;
            const int x1 = std::max((fx + 1) * m.width / fw, x0 + 1);
            std::uint8_t v = 0;
            for (int y = y0; y < y1 && !v; ++y)
                for (int x = x0; x < x1; ++x)
                    if (m.at(std::min(y, m.height - 1), std::min(x, m.width - 1))) {
                        v = 1;
                        break;
                    }
            out.at(fy, fx) = v;
        }
    }
    return out;
}

PixelPairSet sample_pairs(const LabelMap& src_labels, const LabelMap& tgt_labels,
                          const NoiseMask* tgt_mask, const ContrastConfig& cfg,
                          Rng& rng) {
    if (tgt_mask && tgt_mask->size() != tgt_labels.size())
        throw std::invalid_argument("sample_pairs: mask shape mismatch");
    // candidates per class, source image first, scan order
    std::map<int, std::vector<PixelRef>> by_class;
    auto collect = [&](const LabelMap& lm, std::uint8_t img, const NoiseMask* mask) {
        for (int j = 0; j < static_cast<int>(lm.size()); ++j) {
            const int lbl = lm.data[j];
            if (lbl == kIgnoreLabel) continue;
            if (mask && mask->data[j]) continue;
            by_class[lbl].push_back({img, j});
        }
    };
    collect(src_labels, 0, nullptr);
    collect(tgt_labels, 1, tgt_mask);

    PixelPairSet ps;
    for (const auto& [cls, candidates] : by_class) {
        if (candidates.size() < 2) continue;  // no positives possible
        std::vector<PixelRef> anchors =
            sample_without_replacement(candidates, cfg.anchors_per_class, rng);
        for (const PixelRef& a : anchors) {
            PixelPairSet::Anchor an;
            an.ref = a;
            an.cls = cls;
            for (const PixelRef& c : candidates)
                if (!(c == a)) an.positives.push_back(c);
            std::vector<PixelRef> neg_pool;
            for (const auto& [other_cls, other] : by_class)
                if (other_cls != cls)
                    neg_pool.insert(neg_pool.end(), other.begin(), other.end());
            an.negatives = sample_without_replacement(std::move(neg_pool),
                                                      cfg.max_negatives, rng);
            // fixed summation order regardless of sampling order
            std::sort(an.positives.begin(), an.positives.end());
            std::sort(an.negatives.begin(), an.negatives.end());
            ps.anchors.push_back(std::move(an));
        }
    }
    return ps;
}

double contrastive_loss(const Grid2D& feat_src, const Grid2D& feat_tgt,
                        const PixelPairSet& pairs, double zeta, bool* empty_flag) {
    if (zeta <= 0.0) throw std::invalid_argument("contrastive_loss: zeta must be > 0");
    if (empty_flag) *empty_flag = pairs.empty();
    FeatView f{{&feat_src, &feat_tgt}};
    return loss_core(f, pairs, zeta, nullptr);
}

Tape::NodeId contrastive_on(Tape& t, Tape::NodeId feat_src, Tape::NodeId feat_tgt,
                            PixelPairSet pairs, double zeta) {
    FeatView f{{&t.value(feat_src), &t.value(feat_tgt)}};
    Grid2D out(1, 1, 1);
    out.data[0] = loss_core(f, pairs, zeta, nullptr);
    auto ps = std::make_shared<PixelPairSet>(std::move(pairs));
    return t.custom(
        {feat_src, feat_tgt}, std::move(out),
        [feat_src, feat_tgt, ps, zeta](Tape& tt, Tape::NodeId self) {
            const double g = tt.grad_of(self).data[0];
            if (g == 0.0) return;
            FeatView fv{{&tt.value(feat_src), &tt.value(feat_tgt)}};
            Grid2D dsrc(fv.g[0]->channels, fv.g[0]->height, fv.g[0]->width);
            Grid2D dtgt(fv.g[1]->channels, fv.g[1]->height, fv.g[1]->width);
            Grid2D* dg[2] = {&dsrc, &dtgt};
            loss_core(fv, *ps, zeta, dg);
            Grid2D& ga = tt.grad_accum(feat_src);
            Grid2D& gb = tt.grad_accum(feat_tgt);
            for (std::size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += g * dsrc.data[i];
            for (std::size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += g * dtgt.data[i];
        });
}

}  // namespace prnuda

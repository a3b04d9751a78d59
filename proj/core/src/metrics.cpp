#include "prnuda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace prnuda {

MetricsRecord miou(const std::vector<LabelMap>& preds, const std::vector<LabelMap>& gts,
                   int num_classes, int ignore_index) {
    if (preds.size() != gts.size())
        throw std::invalid_argument("miou: list length mismatch");
    std::vector<long> inter(num_classes, 0), pred_n(num_classes, 0), gt_n(num_classes, 0);
    long counted = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!preds[i].same_shape(gts[i]))
            throw std::invalid_argument("miou: shape mismatch at index " + std::to_string(i));
        for (std::size_t j = 0; j < gts[i].size(); ++j) {
            const int g = gts[i].data[j];
            if (g == ignore_index) continue;
            const int p = preds[i].data[j];
            ++counted;
            if (g >= 0 && g < num_classes) ++gt_n[g];
            if (p >= 0 && p < num_classes) ++pred_n[p];
            if (p == g) ++inter[g];
        }
    }
    MetricsRecord r;
    r.per_class_iou.assign(num_classes, std::numeric_limits<double>::quiet_NaN());
    if (counted == 0) {
        r.empty = true;
        return r;
    }
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < num_classes; ++c) {
        if (gt_n[c] == 0) continue;  // absent from all GT
        const long uni = gt_n[c] + pred_n[c] - inter[c];
        r.per_class_iou[c] = uni > 0 ? static_cast<double>(inter[c]) / uni : 0.0;
        sum += r.per_class_iou[c];
        ++present;
    }
    r.miou = present > 0 ? sum / present : 0.0;
    return r;
}

std::tuple<double, double, double> mask_quality(const NoiseMask& pred,
                                                const NoiseMask& truth) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("mask_quality: shape mismatch");
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        const bool p = pred.data[j] != 0;
        const bool t = truth.data[j] != 0;
        tp += (p && t);
        fp += (p && !t);
        fn += (!p && t);
    }
    const double precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 1.0;
    const double recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;
    const double f1 =
        (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    return {precision, recall, f1};
}

namespace {

std::vector<double> ranks_of(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * (i + j) + 1.0;  // average rank, 1-based
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: need two equal-length series");
    const std::vector<double> ra = ranks_of(a), rb = ranks_of(b);
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

}  // namespace prnuda

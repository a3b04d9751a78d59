#pragma once

#include <tuple>
#include <vector>

#include "prnuda/grid.hpp"

namespace prnuda {

struct MetricsRecord {
    std::vector<double> per_class_iou;  // NaN for classes absent from all GT
    double miou = 0.0;
    double mask_precision = 1.0;
    double mask_recall = 1.0;
    double mask_f1 = 1.0;
    double pseudo_accuracy_clean = 0.0;
    bool empty = false;  // set when every pixel was ignore
};

// Confusion-matrix IoU per class; classes absent from all GT are excluded
// from the mean, ignore pixels are excluded everywhere.
MetricsRecord miou(const std::vector<LabelMap>& preds, const std::vector<LabelMap>& gts,
                   int num_classes, int ignore_index);

// (precision, recall, f1) with noisy = positive. Empty-positive truth gives
// recall 1 and precision 1 when nothing was predicted.
std::tuple<double, double, double> mask_quality(const NoiseMask& pred,
                                                const NoiseMask& truth);

// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace prnuda

#include <doctest.h>

#include <cmath>

#include "prnuda/metrics.hpp"
#include "prnuda/rng.hpp"

using namespace prnuda;

TEST_CASE("miou: perfect prediction scores 1") {
    LabelMap g(4, 4);
    Rng rng(1);
    for (int& v : g.data) v = rng.uniform_int(3);
    MetricsRecord r = miou({g}, {g}, 3, kIgnoreLabel);
    CHECK(r.miou == doctest::Approx(1.0));
    for (int c = 0; c < 3; ++c)
        if (!std::isnan(r.per_class_iou[c])) CHECK(r.per_class_iou[c] == doctest::Approx(1.0));
}

TEST_CASE("miou: constant prediction against a half/half GT (confusion counting)") {
    LabelMap pred(4, 4, 0);
    LabelMap gt(4, 4, 0);
    for (int y = 2; y < 4; ++y)
        for (int x = 0; x < 4; ++x) gt.at(y, x) = 1;
    MetricsRecord r = miou({pred}, {gt}, 2, kIgnoreLabel);
    CHECK(r.per_class_iou[0] == doctest::Approx(0.5));
    CHECK(r.per_class_iou[1] == doctest::Approx(0.0));
    CHECK(r.miou == doctest::Approx(0.25));
}

TEST_CASE("miou: ignore pixels excluded, absent classes excluded from the mean") {
    LabelMap pred(2, 2, 1);
    LabelMap gt(2, 2, 1);
    gt.at(0, 0) = kIgnoreLabel;
    pred.at(0, 0) = 0;  // prediction at an ignore pixel must not matter
    MetricsRecord r = miou({pred}, {gt}, 4, kIgnoreLabel);
    CHECK(r.miou == doctest::Approx(1.0));
    CHECK(std::isnan(r.per_class_iou[0]));
    CHECK(std::isnan(r.per_class_iou[2]));
}

TEST_CASE("miou: all-ignore GT yields the empty flag") {
    LabelMap pred(2, 2, 0);
    LabelMap gt(2, 2, kIgnoreLabel);
    MetricsRecord r = miou({pred}, {gt}, 3, kIgnoreLabel);
    CHECK(r.empty);
}

TEST_CASE("miou rejects mismatched list lengths") {
    LabelMap a(2, 2, 0);
    CHECK_THROWS_AS(miou({a, a}, {a}, 2, kIgnoreLabel), std::invalid_argument);
}

TEST_CASE("miou matches a per-pixel confusion oracle on random instances") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + rng.uniform_int(4);
        LabelMap pred(6, 6), gt(6, 6);
        for (int& v : pred.data) v = rng.uniform_int(k);
        for (int& v : gt.data) v = rng.bernoulli(0.1) ? kIgnoreLabel : rng.uniform_int(k);
        MetricsRecord r = miou({pred}, {gt}, k, kIgnoreLabel);

        double sum = 0.0;
        int present = 0;
        for (int c = 0; c < k; ++c) {
            long inter = 0, in_pred = 0, in_gt = 0;
            for (std::size_t j = 0; j < gt.size(); ++j) {
                if (gt.data[j] == kIgnoreLabel) continue;
                in_gt += (gt.data[j] == c);
                in_pred += (pred.data[j] == c);
                inter += (gt.data[j] == c && pred.data[j] == c);
            }
            if (in_gt == 0) continue;
            sum += static_cast<double>(inter) / (in_gt + in_pred - inter);
            ++present;
        }
        CHECK(r.miou == doctest::Approx(present ? sum / present : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("mask_quality: trivial and oracle cases") {
    NoiseMask a(4, 4, 1);
    auto [p1, r1, f1] = mask_quality(a, a);
    CHECK(p1 == 1.0);
    CHECK(r1 == 1.0);
    CHECK(f1 == 1.0);

    NoiseMask none(4, 4, 0);
    NoiseMask half(4, 4, 0);
    for (int j = 0; j < 8; ++j) half.data[j] = 1;
    auto [p2, r2, f2] = mask_quality(none, half);
    CHECK(r2 == 0.0);

    // empty-positive truth conventions
    auto [p3, r3, f3] = mask_quality(none, none);
    CHECK(p3 == 1.0);
    CHECK(r3 == 1.0);

    Rng rng(6);
    NoiseMask pred(5, 5), truth(5, 5);
    for (auto& v : pred.data) v = rng.bernoulli(0.4);
    for (auto& v : truth.data) v = rng.bernoulli(0.4);
    auto [p, r, f] = mask_quality(pred, truth);
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        tp += (pred.data[j] && truth.data[j]);
        fp += (pred.data[j] && !truth.data[j]);
        fn += (!pred.data[j] && truth.data[j]);
    }
    CHECK(p == doctest::Approx(static_cast<double>(tp) / (tp + fp)));
    CHECK(r == doctest::Approx(static_cast<double>(tp) / (tp + fn)));
    CHECK(f == doctest::Approx(2.0 * p * r / (p + r)));
}

TEST_CASE("spearman: monotone series and anti-monotone series") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> up = {10, 20, 30, 40, 50};
    std::vector<double> down = {5, 4, 3, 2, 1};
    CHECK(spearman(x, up) == doctest::Approx(1.0));
    CHECK(spearman(x, down) == doctest::Approx(-1.0));
    std::vector<double> curved = {1, 4, 9, 16, 25};  // rank-identical
    CHECK(spearman(x, curved) == doctest::Approx(1.0));
}

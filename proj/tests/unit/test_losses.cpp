#include <doctest.h>

#include <cmath>

#include "prnuda/losses.hpp"
#include "prnuda/numerics.hpp"
#include "prnuda/rng.hpp"
#include "prnuda/selftrain.hpp"

using namespace prnuda;

namespace {

Grid2D random_logits(int k, int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    Grid2D g(k, h, w);
    for (double& v : g.data) v = rng.uniform(-3.0, 3.0);
    return g;
}

// independent per-pixel scalar oracle
double ce_oracle_sum(const Grid2D& l, const LabelMap& y, const NoiseMask* skip) {
    double total = 0.0;
    const std::size_t plane = l.plane();
    for (std::size_t j = 0; j < plane; ++j) {
        if (y.data[j] == kIgnoreLabel) continue;
        if (skip && skip->data[j]) continue;
        double denom = 0.0;
        for (int c = 0; c < l.channels; ++c) denom += std::exp(l.data[c * plane + j]);
        total -= std::log(std::exp(l.data[y.data[j] * plane + j]) / denom);
    }
    return total;
}

}  // namespace

TEST_CASE("ce_source: saturated-correct logits approach zero loss") {
    LabelMap y(4, 4);
    Rng rng(1);
    for (int& v : y.data) v = rng.uniform_int(3);
    Grid2D l(3, 4, 4, 0.0);
    for (int yy = 0; yy < 4; ++yy)
        for (int xx = 0; xx < 4; ++xx) l.at(y.at(yy, xx), yy, xx) = 200.0;
    CHECK(ce_source(l, y).sum == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ce_source: uniform logits give ln K per pixel") {
    Grid2D l(4, 3, 3, 0.7);
    LabelMap y(3, 3, 2);
    CeResult r = ce_source(l, y);
    CHECK(r.mean == doctest::Approx(std::log(4.0)).epsilon(1e-9));
    CHECK(r.pixels == 9);
}

TEST_CASE("ce_source matches the scalar loop oracle and rejects bad labels") {
    Grid2D l = random_logits(3, 4, 4, 5);
    LabelMap y(4, 4);
    Rng rng(6);
    for (int& v : y.data) v = rng.uniform_int(3);
    CHECK(ce_source(l, y).sum == doctest::Approx(ce_oracle_sum(l, y, nullptr)).epsilon(1e-9));

    y.data[3] = 7;  // >= K and not ignore
    CHECK_THROWS_AS(ce_source(l, y), std::invalid_argument);
}

TEST_CASE("ce_source skips ignore pixels") {
    Grid2D l = random_logits(3, 2, 2, 8);
    LabelMap y(2, 2, 1);
    y.data[0] = kIgnoreLabel;
    CeResult r = ce_source(l, y);
    CHECK(r.pixels == 3);
}

TEST_CASE("ce_target: eta scaling, all-noisy mask, and the masked-sum oracle") {
    Grid2D l = random_logits(3, 4, 4, 9);
    LabelMap y(4, 4);
    Rng rng(10);
    for (int& v : y.data) v = rng.uniform_int(3);

    NoiseMask none(4, 4, 0);
    CHECK(ce_target(l, y, none, 0.0).sum == 0.0);  // eta = 0

    NoiseMask all(4, 4, 1);
    CHECK(ce_target(l, y, all, 0.9).sum == 0.0);  // no clean pixels
    CHECK(ce_target(l, y, all, 0.9).pixels == 0);

    NoiseMask half(4, 4, 0);
    for (std::size_t j = 0; j < half.size(); ++j) half.data[j] = (j % 2) ? 1 : 0;
    CeResult r = ce_target(l, y, half, 0.5);
    CHECK(r.sum == doctest::Approx(0.5 * ce_oracle_sum(l, y, &half)).epsilon(1e-9));
}

TEST_CASE("ce_target with all-clean mask and eta 1 equals ce_source exactly") {
    Grid2D l = random_logits(4, 6, 6, 11);
    LabelMap y(6, 6);
    Rng rng(12);
    for (int& v : y.data) v = rng.uniform_int(4);
    NoiseMask clean(6, 6, 0);
    CHECK(ce_target(l, y, clean, 1.0).sum == ce_source(l, y).sum);
    CHECK(ce_target(l, y, clean, 1.0).mean == ce_source(l, y).mean);
}

TEST_CASE("bce and prn_source_losses: saturated and ln-2 cases, scalar oracle") {
    NoiseMask t(3, 3);
    t.data = {1, 0, 1, 0, 0, 1, 1, 0, 0};

    Grid2D zero(1, 3, 3, 0.0);
    CHECK(bce_mean(zero, t) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    Grid2D sat(1, 3, 3);
    for (std::size_t j = 0; j < t.size(); ++j) sat.data[j] = t.data[j] ? 50.0 : -50.0;
    CHECK(bce_mean(sat, t) == doctest::Approx(0.0).epsilon(1e-12));

    Rng rng(13);
    Grid2D z(1, 3, 3);
    for (double& v : z.data) v = rng.uniform(-2, 2);
    double oracle = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double p = 1.0 / (1.0 + std::exp(-z.data[j]));
        oracle -= t.data[j] ? std::log(p) : std::log(1.0 - p);
    }
    CHECK(bce_mean(z, t) == doctest::Approx(oracle / 9.0).epsilon(1e-9));

    // saturated-correct refined head + mask head -> both losses vanish
    LabelMap y(3, 3, 1);
    Grid2D seg(3, 3, 3, 0.0);
    for (int yy = 0; yy < 3; ++yy)
        for (int xx = 0; xx < 3; ++xx) seg.at(1, yy, xx) = 60.0;
    PrnOutput out{seg, sat};
    auto [ce, bce] = prn_source_losses(out, y, t);
    CHECK(ce == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bce == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("confidence_threshold: trivial extremes and the counting oracle") {
    // one-hot probabilities
    Grid2D onehot(19, 4, 4, 0.0);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) onehot.at(3, y, x) = 1.0;
    CHECK(confidence_threshold(onehot, 0.968) == doctest::Approx(1.0));

    Grid2D uniform(19, 4, 4, 1.0 / 19.0);
    CHECK(confidence_threshold(uniform, 0.968) == doctest::Approx(0.0));

    // exactly 25% of pixels confident
    Grid2D mixed(4, 4, 4, 0.25);
    for (int x = 0; x < 4; ++x) {
        for (int c = 0; c < 4; ++c) mixed.at(c, 0, x) = (c == 0) ? 0.99 : 0.01 / 3;
    }
    CHECK(confidence_threshold(mixed, 0.968) == doctest::Approx(0.25));

    CHECK_THROWS_AS(confidence_threshold(uniform, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(confidence_threshold(uniform, 1.0), std::invalid_argument);
}

TEST_CASE("confidence_mask: counting semantics") {
    NoiseMask zeros(8, 8, 0);
    CHECK(confidence_mask(zeros) == doctest::Approx(1.0));
    NoiseMask ones(8, 8, 1);
    CHECK(confidence_mask(ones) == doctest::Approx(0.0));
    NoiseMask some(8, 8, 0);
    for (int j = 0; j < 37; ++j) some.data[j] = 1;
    CHECK(confidence_mask(some) == doctest::Approx(27.0 / 64.0));
}

TEST_CASE("total_losses: weighted-sum arithmetic with the paper lambdas") {
    LossReport r;
    r.source_ce = r.target_ce = r.contrastive = 1.0;
    r.prn_source_ce = r.prn_source_bce = r.prn_target_ce = r.prn_target_bce = 1.0;
    auto [student, prn] = total_losses(r, 0.1, 25.0);
    CHECK(student == doctest::Approx(2.1));
    CHECK(prn == doctest::Approx(52.0));

    auto [s0, p0] = total_losses(r, 0.0, 0.0);
    CHECK(s0 == doctest::Approx(2.0));
    CHECK(p0 == doctest::Approx(2.0));
}

TEST_CASE("prn_target_losses: tau2 gating during warm-up, mask gating after") {
    const int k = 3, h = 4, w = 4;
    PseudoLabelBundle ref;
    ref.labels = LabelMap(h, w, 1);
    ref.max_prob = Grid2D(1, h, w, 0.5);  // everything below tau2
    ref.noise_mask = NoiseMask(h, w, 0);
    ref.has_noise_mask = true;

    PrnOutput out{random_logits(k, h, w, 21), Grid2D(1, h, w, 0.0)};
    NoiseMask mu_gt(h, w, 0);
    PrnGateConfig cfg{0.968, 100, true};

    // warm-up, all reference probs < tau2 -> CE 0, BCE = ln 2
    auto [ce0, bce0] = prn_target_losses(out, ref, mu_gt, 10, cfg);
    CHECK(ce0 == 0.0);
    CHECK(bce0 == doctest::Approx(std::log(2.0)));

    // post-warm-up, predicted mask all-one -> CE 0
    ref.noise_mask = NoiseMask(h, w, 1);
    auto [ce1, bce1] = prn_target_losses(out, ref, mu_gt, 200, cfg);
    CHECK(ce1 == 0.0);
    CHECK(bce1 == doctest::Approx(std::log(2.0)));

    // random known mask -> masked scalar oracle
    Rng rng(22);
    NoiseMask m(h, w);
    for (auto& v : m.data) v = rng.bernoulli(0.4) ? 1 : 0;
    ref.noise_mask = m;
    auto [ce2, bce2] = prn_target_losses(out, ref, mu_gt, 200, cfg);
    CHECK(ce2 == doctest::Approx(ce_target(out.refined_logits, ref.labels, m, 1.0).mean));
    CHECK(bce2 == doctest::Approx(std::log(2.0)));
}

#include <doctest.h>

#include <cmath>

#include "prnuda/augment.hpp"

using namespace prnuda;

namespace {

Grid2D random_image(int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    Grid2D g(3, h, w);
    for (double& v : g.data) v = rng.uniform();
    return g;
}

}  // namespace

TEST_CASE("color_jitter: strength 0 is the identity; output stays in [0,1]") {
    Grid2D x = random_image(8, 8, 1);
    Rng rng(2);
    Grid2D same = color_jitter(x, 0.0, rng);
    CHECK(same.data == x.data);

    Rng rng2(3);
    Grid2D strong = color_jitter(x, 0.95, rng2);
    for (double v : strong.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(strong.same_shape(x));
}

TEST_CASE("gaussian_blur: sigma 0 identity, constant preserved, kernel sums to 1") {
    Grid2D x = random_image(8, 8, 4);
    CHECK(gaussian_blur(x, 0.0).data == x.data);

    Grid2D flat(3, 8, 8, 0.42);
    Grid2D b = gaussian_blur(flat, 1.3);
    for (double v : b.data) CHECK(v == doctest::Approx(0.42).epsilon(1e-9));

    Grid2D impulse(1, 15, 15, 0.0);
    impulse.at(0, 7, 7) = 1.0;
    Grid2D k = gaussian_blur(impulse, 0.8);
    double total = 0.0;
    for (double v : k.data) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(k.at(0, 7, 7) > k.at(0, 7, 8));
}

TEST_CASE("classmix: degenerate draws and the per-pixel select oracle") {
    Grid2D src = random_image(6, 6, 5);
    Grid2D tgt = random_image(6, 6, 6);
    LabelMap src_lbl(6, 6, 0);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 6; ++x) src_lbl.at(y, x) = 1 + (x % 2);
    LabelMap tgt_lbl(6, 6, 3);

    Rng rng(7);
    MixResult none = classmix(src, src_lbl, tgt, tgt_lbl, 0.0, rng);
    CHECK(none.image.data == tgt.data);
    CHECK(none.labels.data == tgt_lbl.data);
    CHECK(none.source_origin.count_ones() == 0);

    MixResult all = classmix(src, src_lbl, tgt, tgt_lbl, 1.0, rng);
    CHECK(all.image.data == src.data);
    CHECK(all.labels.data == src_lbl.data);

    MixResult half = classmix(src, src_lbl, tgt, tgt_lbl, 0.5, rng);
    // ceil(3/2) = 2 classes pasted; verify the per-pixel select oracle
    for (std::size_t j = 0; j < tgt_lbl.size(); ++j) {
        if (half.source_origin.data[j]) {
            CHECK(half.labels.data[j] == src_lbl.data[j]);
            CHECK(half.image.data[j] == src.data[j]);
        } else {
            CHECK(half.labels.data[j] == tgt_lbl.data[j]);
            CHECK(half.image.data[j] == tgt.data[j]);
        }
    }
    // pasted pixels form whole classes
    std::vector<bool> pasted_class(8, false), kept_class(8, false);
    for (std::size_t j = 0; j < tgt_lbl.size(); ++j)
        (half.source_origin.data[j] ? pasted_class : kept_class)[src_lbl.data[j]] = true;
    for (int c = 0; c < 8; ++c) CHECK(!(pasted_class[c] && kept_class[c]));
}

TEST_CASE("classmix label set stays within the input label sets") {
    Grid2D src = random_image(8, 8, 8);
    Grid2D tgt = random_image(8, 8, 9);
    Rng lrng(10);
    LabelMap src_lbl(8, 8), tgt_lbl(8, 8);
    for (int& v : src_lbl.data) v = lrng.uniform_int(4);
    for (int& v : tgt_lbl.data) v = 2 + lrng.uniform_int(2);
    Rng rng(11);
    MixResult r = classmix(src, src_lbl, tgt, tgt_lbl, 0.5, rng);
    for (int v : r.labels.data) CHECK((v >= 0 && v < 4));
}

TEST_CASE("mask_guided_mix: all-zero, all-one, and checkerboard oracles") {
    Grid2D src = random_image(4, 4, 12);
    Grid2D tgt = random_image(4, 4, 13);
    LabelMap src_lbl(4, 4, 1), tgt_lbl(4, 4, 2);

    MixResult keep = mask_guided_mix(tgt, tgt_lbl, NoiseMask(4, 4, 0), src, src_lbl);
    CHECK(keep.image.data == tgt.data);
    CHECK(keep.labels.data == tgt_lbl.data);

    MixResult swap = mask_guided_mix(tgt, tgt_lbl, NoiseMask(4, 4, 1), src, src_lbl);
    CHECK(swap.image.data == src.data);
    CHECK(swap.labels.data == src_lbl.data);

    NoiseMask checker(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) checker.at(y, x) = (x + y) % 2;
    MixResult mix = mask_guided_mix(tgt, tgt_lbl, checker, src, src_lbl);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            const bool s = checker.at(y, x);
            CHECK(mix.labels.at(y, x) == (s ? 1 : 2));
            for (int c = 0; c < 3; ++c)
                CHECK(mix.image.at(c, y, x) == (s ? src.at(c, y, x) : tgt.at(c, y, x)));
            CHECK(mix.source_origin.at(y, x) == (s ? 1 : 0));
        }

    Grid2D small(3, 4, 2);
    CHECK_THROWS_AS(mask_guided_mix(tgt, tgt_lbl, checker, small, src_lbl),
                    std::invalid_argument);
}

TEST_CASE("mix_weights: 1 on source-origin pixels, eta elsewhere") {
    NoiseMask origin(2, 2);
    origin.data = {1, 0, 0, 1};
    auto w = mix_weights(origin, 0.73);
    CHECK(w == std::vector<double>{1.0, 0.73, 0.73, 1.0});
}

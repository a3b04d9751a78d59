#include <doctest.h>

#include <cmath>
#include <complex>

#include "prnuda/numerics.hpp"
#include "prnuda/rng.hpp"

using namespace prnuda;

namespace {

// Independent O(n^4) DFT oracle, shifted layout like Spectrum2D.
Spectrum2D dft_oracle(const Grid2D& g) {
    Spectrum2D s(g.channels, g.height, g.width);
    const int h = g.height, w = g.width;
    const int cy = s.dc_y(), cx = s.dc_x();
    for (int c = 0; c < g.channels; ++c)
        for (int u = 0; u < h; ++u)
            for (int v = 0; v < w; ++v) {
                std::complex<double> acc(0, 0);
                for (int y = 0; y < h; ++y)
                    for (int x = 0; x < w; ++x) {
                        const double ang = -2.0 * M_PI *
                                           (static_cast<double>(u) * y / h +
                                            static_cast<double>(v) * x / w);
                        acc += g.at(c, y, x) * std::complex<double>(std::cos(ang), std::sin(ang));
                    }
                const int sy = (u + cy) % h, sx = (v + cx) % w;
                s.re[s.idx(c, sy, sx)] = acc.real();
                s.im[s.idx(c, sy, sx)] = acc.imag();
            }
    return s;
}

Grid2D random_grid(int c, int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    Grid2D g(c, h, w);
    for (double& v : g.data) v = rng.uniform(-2.0, 2.0);
    return g;
}

}  // namespace

TEST_CASE("fft2 of a constant grid concentrates all energy at DC") {
    Grid2D g(1, 8, 8, 1.0);
    Spectrum2D s = fft2(g);
    auto [amp, ph] = amp_phase(s);
    CHECK(amp.at(0, 4, 4) == doctest::Approx(64.0).epsilon(1e-9));
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            if (y != 4 || x != 4) CHECK(std::abs(amp.at(0, y, x)) < 1e-9);
}

TEST_CASE("fft2 of a unit impulse is flat in amplitude") {
    Grid2D g(1, 8, 8, 0.0);
    g.at(0, 0, 0) = 1.0;
    auto [amp, ph] = amp_phase(fft2(g));
    for (double a : amp.data) CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fft2 matches the direct DFT oracle") {
    for (auto [h, w] : {std::pair{4, 4}, {8, 8}, {6, 10}, {7, 5}}) {
        Grid2D g = random_grid(2, h, w, 42 + h * 100 + w);
        Spectrum2D fast = fft2(g);
        Spectrum2D slow = dft_oracle(g);
        for (std::size_t i = 0; i < fast.size(); ++i) {
            CHECK(fast.re[i] == doctest::Approx(slow.re[i]).epsilon(1e-9).scale(1.0));
            CHECK(fast.im[i] == doctest::Approx(slow.im[i]).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("ifft2(fft2(g)) reproduces g within 1e-6") {
    for (auto [h, w] : {std::pair{16, 16}, {12, 20}, {9, 7}}) {
        Grid2D g = random_grid(3, h, w, 7 + h + w);
        double residue = 1.0;
        Grid2D back = ifft2(fft2(g), &residue);
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(std::abs(back.data[i] - g.data[i]) < 1e-6);
        CHECK(residue < 1e-4);
    }
}

TEST_CASE("fft2 preserves Parseval energy within 1e-6 relative") {
    Grid2D g = random_grid(1, 16, 16, 99);
    Spectrum2D s = fft2(g);
    double spatial = 0.0, spectral = 0.0;
    for (double v : g.data) spatial += v * v;
    for (std::size_t i = 0; i < s.size(); ++i)
        spectral += s.re[i] * s.re[i] + s.im[i] * s.im[i];
    spectral /= static_cast<double>(g.plane());
    CHECK(std::abs(spectral - spatial) / spatial < 1e-6);
}

TEST_CASE("fft2 rejects non-finite input") {
    Grid2D g(1, 4, 4, 0.0);
    g.data[5] = std::nan("");
    CHECK_THROWS_AS(fft2(g), std::invalid_argument);
}

TEST_CASE("ifft2 of the zero spectrum is the zero grid") {
    Spectrum2D s(1, 8, 6);
    Grid2D g = ifft2(s);
    for (double v : g.data) CHECK(v == 0.0);
}

TEST_CASE("ifft2 after doubling the DC amplitude matches the direct oracle on 4x4") {
    Grid2D g = random_grid(1, 4, 4, 4444);
    Spectrum2D s = fft2(g);
    s.re[s.idx(0, 2, 2)] *= 2.0;
    s.im[s.idx(0, 2, 2)] *= 2.0;
    // oracle: doubling DC adds mean to every sample
    double mean = 0.0;
    for (double v : g.data) mean += v;
    mean /= 16.0;
    Grid2D back = ifft2(s);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(g.data[i] + mean).epsilon(1e-9));
}

TEST_CASE("amp_phase is the Pythagorean decomposition with the zero-bin convention") {
    Spectrum2D s(1, 4, 4);
    s.re[s.idx(0, 1, 2)] = 3.0;
    s.im[s.idx(0, 1, 2)] = 4.0;
    auto [amp, ph] = amp_phase(s);
    CHECK(amp.at(0, 1, 2) == doctest::Approx(5.0));
    CHECK(ph.at(0, 1, 2) == doctest::Approx(std::atan2(4.0, 3.0)));
    CHECK(amp.at(0, 0, 0) == 0.0);
    CHECK(ph.at(0, 0, 0) == 0.0);  // zero bin phase defined as 0
}

TEST_CASE("recompose(amp_phase(s)) roundtrips within 1e-6") {
    Grid2D g = random_grid(2, 8, 8, 31);
    Spectrum2D s = fft2(g);
    auto [amp, ph] = amp_phase(s);
    Spectrum2D back = recompose(amp, ph);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(back.re[i] - s.re[i]) < 1e-6);
        CHECK(std::abs(back.im[i] - s.im[i]) < 1e-6);
    }
}

TEST_CASE("softmax_channels basics") {
    Grid2D l(2, 1, 1);
    l.at(0, 0, 0) = 0.0;
    l.at(1, 0, 0) = 0.0;
    Grid2D p = softmax_channels(l);
    CHECK(p.at(0, 0, 0) == doctest::Approx(0.5));
    CHECK(p.at(1, 0, 0) == doctest::Approx(0.5));

    l.at(0, 0, 0) = 1000.0;  // stability case
    p = softmax_channels(l);
    CHECK(p.at(0, 0, 0) == doctest::Approx(1.0));
    CHECK(p.at(1, 0, 0) == doctest::Approx(0.0));

    Grid2D l3(3, 1, 1);
    l3.at(0, 0, 0) = 1.0;
    l3.at(1, 0, 0) = 2.0;
    l3.at(2, 0, 0) = 3.0;
    Grid2D p3 = softmax_channels(l3);
    CHECK(p3.at(0, 0, 0) == doctest::Approx(0.0900).epsilon(1e-3));
    CHECK(p3.at(1, 0, 0) == doctest::Approx(0.2447).epsilon(1e-3));
    CHECK(p3.at(2, 0, 0) == doctest::Approx(0.6652).epsilon(1e-3));
}

TEST_CASE("softmax rows sum to 1 and argmax is shift-invariant") {
    Grid2D l = random_grid(5, 6, 6, 17);
    Grid2D p = softmax_channels(l);
    const std::size_t plane = l.plane();
    for (std::size_t j = 0; j < plane; ++j) {
        double s = 0.0;
        for (int c = 0; c < 5; ++c) s += p.data[c * plane + j];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    }
    Grid2D shifted = l;
    for (std::size_t j = 0; j < plane; ++j)
        for (int c = 0; c < 5; ++c) shifted.data[c * plane + j] += 3.7;
    LabelMap a = argmax_labels(softmax_channels(l));
    LabelMap b = argmax_labels(softmax_channels(shifted));
    CHECK(a.data == b.data);
}

TEST_CASE("argmax_labels: one-hot, ties, and the per-pixel scan oracle") {
    Grid2D onehot(3, 2, 2, 0.0);
    onehot.at(2, 0, 0) = 1.0;
    onehot.at(1, 1, 1) = 1.0;
    LabelMap l = argmax_labels(onehot);
    CHECK(l.at(0, 0) == 2);
    CHECK(l.at(1, 1) == 1);
    CHECK(l.at(0, 1) == 0);  // all-equal tie breaks to lowest index

    Grid2D eq(4, 3, 3, 1.25);
    for (int v : argmax_labels(eq).data) CHECK(v == 0);

    Grid2D r = random_grid(4, 8, 8, 2024);
    LabelMap fast = argmax_labels(r);
    const std::size_t plane = r.plane();
    for (std::size_t j = 0; j < plane; ++j) {
        int best = 0;
        for (int c = 1; c < 4; ++c)
            if (r.data[c * plane + j] > r.data[best * plane + j]) best = c;
        CHECK(fast.data[j] == best);
    }
}

TEST_CASE("argmax_labels is invariant under strictly monotone transforms") {
    Grid2D l = random_grid(4, 5, 5, 321);
    Grid2D cubed = l;
    for (double& v : cubed.data) v = std::exp(0.5 * v) + v;  // strictly increasing
    CHECK(argmax_labels(l).data == argmax_labels(cubed).data);
}

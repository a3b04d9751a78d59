#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "prnuda/checkpoint.hpp"
#include "prnuda/network.hpp"
#include "prnuda/optimizer.hpp"
#include "prnuda/rng.hpp"
#include "prnuda/selftrain.hpp"

using namespace prnuda;

namespace {

Grid2D random_image(int c, int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    Grid2D g(c, h, w);
    for (double& v : g.data) v = rng.uniform();
    return g;
}

ArchDescriptor small_arch() {
    ArchDescriptor a;
    a.num_classes = 4;
    a.enc_w1 = 4;
    a.enc_w2 = 6;
    a.enc_w3 = 8;
    a.prn_width = 8;
    return a;
}

}  // namespace

TEST_CASE("layout length equals the parameter vector length") {
    for (ModelKind kind : {ModelKind::Segmenter, ModelKind::PrnDecoder}) {
        ModelState m = make_model(small_arch(), kind, 1);
        std::size_t total = 0;
        for (const auto& e : m.layout) {
            CHECK(e.offset == total);
            total += e.count;
        }
        CHECK(total == m.params.size());
    }
}

TEST_CASE("encode: zero image through zero weights gives zero features") {
    ModelState m = make_model(small_arch(), ModelKind::Segmenter, 1);
    std::fill(m.params.begin(), m.params.end(), 0.0);
    Grid2D x(3, 16, 16, 0.0);
    FeatureMap f = encode(m, x);
    for (double v : f.features.data) CHECK(v == 0.0);
}

TEST_CASE("encode shape arithmetic and determinism") {
    ModelState m = make_model(small_arch(), ModelKind::Segmenter, 11);
    Grid2D x = random_image(3, 64, 64, 3);
    FeatureMap f1 = encode(m, x);
    FeatureMap f2 = encode(m, x);
    CHECK(f1.features.channels == 8);
    CHECK(f1.features.height == 16);  // stride 4
    CHECK(f1.features.width == 16);
    CHECK(f1.features.data == f2.features.data);  // bitwise identical
}

TEST_CASE("encode rejects channel mismatch") {
    ModelState m = make_model(small_arch(), ModelKind::Segmenter, 1);
    Grid2D x(4, 16, 16, 0.1);
    CHECK_THROWS_AS(encode(m, x), std::invalid_argument);
}

TEST_CASE("decode: zero features with per-class bias gives constant logit planes") {
    ModelState m = make_model(small_arch(), ModelKind::Segmenter, 1);
    std::fill(m.params.begin(), m.params.end(), 0.0);
    const LayoutEntry& b = m.entry("dec.head.b");
    for (std::size_t i = 0; i < b.count; ++i) m.params[b.offset + i] = 0.5 + i;
    FeatureMap f{Grid2D(8, 4, 4, 0.0), 16, 16};
    Grid2D logits = decode(m, f);
    CHECK(logits.channels == 4);
    CHECK(logits.height == 16);
    CHECK(logits.width == 16);
    for (int c = 0; c < 4; ++c)
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                CHECK(logits.at(c, y, x) == doctest::Approx(0.5 + c));
}

TEST_CASE("prn_decode: zero weights give head-bias constants; shapes follow the image") {
    ArchDescriptor a = small_arch();
    ModelState prn = make_model(a, ModelKind::PrnDecoder, 5);
    std::fill(prn.params.begin(), prn.params.end(), 0.0);
    const LayoutEntry& sb = prn.entry("prn.seg.b");
    const LayoutEntry& nb = prn.entry("prn.noise.b");
    for (std::size_t i = 0; i < sb.count; ++i) prn.params[sb.offset + i] = 1.0 + i;
    prn.params[nb.offset] = -2.0;

    FeatureMap f{Grid2D(8, 16, 16, 0.3), 64, 64};
    Grid2D logits(4, 64, 64, 0.7);
    PrnOutput out = prn_decode(prn, f, logits);
    CHECK(out.refined_logits.channels == 4);
    CHECK(out.refined_logits.height == 64);
    CHECK(out.refined_logits.width == 64);
    CHECK(out.noise_logits.channels == 1);
    CHECK(out.noise_logits.height == 64);
    for (int c = 0; c < 4; ++c) CHECK(out.refined_logits.at(c, 10, 10) == doctest::Approx(1.0 + c));
    CHECK(out.noise_logits.at(0, 5, 5) == doctest::Approx(-2.0));
}

TEST_CASE("prn_decode wiring sanity: identity logits path reproduces smooth input logits") {
    ArchDescriptor a = small_arch();
    ModelState prn = make_model(a, ModelKind::PrnDecoder, 5);
    std::fill(prn.params.begin(), prn.params.end(), 0.0);
    const int k = a.num_classes;
    const int fc = a.feature_channels();
    // conv1: copy logit channel j (input channel fc + j) to output channel j
    {
        const LayoutEntry& w = prn.entry("prn.conv1.w");
        const int in_ch = fc + k;
        for (int j = 0; j < k; ++j) {
            const std::size_t base =
                w.offset + ((static_cast<std::size_t>(j) * in_ch + fc + j) * 3) * 3;
            prn.params[base + 4] = 1.0;  // center tap
        }
    }
    // conv2: identity on the first k channels
    {
        const LayoutEntry& w = prn.entry("prn.conv2.w");
        for (int j = 0; j < k; ++j) {
            const std::size_t base =
                w.offset + ((static_cast<std::size_t>(j) * a.prn_width + j) * 3) * 3;
            prn.params[base + 4] = 1.0;
        }
    }
    // seg head: channel j from trunk channel j
    {
        const LayoutEntry& w = prn.entry("prn.seg.w");
        for (int j = 0; j < k; ++j)
            prn.params[w.offset + static_cast<std::size_t>(j) * a.prn_width + j] = 1.0;
    }
    // constant positive logits survive ReLU and the down/up resample exactly
    FeatureMap f{Grid2D(fc, 4, 4, 0.0), 16, 16};
    Grid2D logits(k, 16, 16);
    for (int c = 0; c < k; ++c)
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) logits.at(c, y, x) = 0.5 + 0.25 * c;
    PrnOutput out = prn_decode(prn, f, logits);
    for (int c = 0; c < k; ++c)
        CHECK(out.refined_logits.at(c, 8, 8) == doctest::Approx(0.5 + 0.25 * c).epsilon(1e-9));
}

TEST_CASE("adamw_step: zero gradient with zero decay leaves params unchanged") {
    std::vector<double> p = {1.0, -2.0, 3.0};
    std::vector<double> g = {0.0, 0.0, 0.0};
    OptimState o(3);
    AdamWConfig cfg;
    cfg.weight_decay = 0.0;
    adamw_step(p, g, o, 0.1, cfg);
    CHECK(p == std::vector<double>{1.0, -2.0, 3.0});
    CHECK(o.step == 1);
}

TEST_CASE("adamw_step: first step from zero moments moves against the gradient sign") {
    for (double c : {0.8, -1.2}) {
        std::vector<double> p = {0.0, 0.0};
        std::vector<double> g = {c, c};
        OptimState o(2);
        AdamWConfig cfg;
        cfg.weight_decay = 0.0;
        adamw_step(p, g, o, 0.01, cfg);
        // closed form: -lr * c / (|c| + eps)
        const double expect = -0.01 * c / (std::abs(c) + cfg.eps);
        CHECK(p[0] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("adamw_step: decoupled weight decay scales params by (1 - lr*wd)") {
    std::vector<double> p = {2.0, -4.0};
    std::vector<double> g = {0.0, 0.0};
    OptimState o(2);
    AdamWConfig cfg;
    cfg.weight_decay = 0.01;
    adamw_step(p, g, o, 0.5, cfg);
    CHECK(p[0] == doctest::Approx(2.0 * (1.0 - 0.5 * 0.01)));
    CHECK(p[1] == doctest::Approx(-4.0 * (1.0 - 0.5 * 0.01)));
}

TEST_CASE("adamw_step faults on non-finite gradients") {
    std::vector<double> p = {1.0};
    std::vector<double> g = {std::nan("")};
    OptimState o(1);
    CHECK_THROWS_AS(adamw_step(p, g, o, 0.1, AdamWConfig{}), std::runtime_error);
}

TEST_CASE("lr_at follows warmup then linear decay") {
    LrSchedule s{1500, 40000, 1e-6};
    CHECK(lr_at(0, 6e-5, s) == doctest::Approx(6e-5 * 1e-6));
    CHECK(lr_at(1500, 6e-5, s) == doctest::Approx(6e-5));
    CHECK(lr_at(1500, 6e-4, s) == doctest::Approx(6e-4));
    CHECK(lr_at(40000, 6e-5, s) == doctest::Approx(0.0));
    // halfway through decay
    CHECK(lr_at(1500 + (40000 - 1500) / 2, 6e-5, s) ==
          doctest::Approx(3e-5).epsilon(1e-3));
    CHECK_THROWS_AS(lr_at(-1, 6e-5, s), std::invalid_argument);
}

TEST_CASE("ema_update: convex combination and edge betas") {
    ModelState student = make_model(small_arch(), ModelKind::Segmenter, 7);
    TeacherState t = make_teacher(student, 1.0);
    ModelState moved = student;
    for (double& v : moved.params) v += 1.0;

    TeacherState t1 = ema_update(t, moved);
    CHECK(t1.model.params == t.model.params);  // beta = 1 keeps the teacher

    t.beta = 0.0;
    TeacherState t2 = ema_update(t, moved);
    CHECK(t2.model.params == moved.params);  // beta = 0 copies the student

    TeacherState half{student, 0.5};
    std::fill(half.model.params.begin(), half.model.params.end(), 0.0);
    ModelState twos = student;
    std::fill(twos.params.begin(), twos.params.end(), 2.0);
    TeacherState mid = ema_update(half, twos);
    for (double v : mid.model.params) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("checkpoint roundtrip preserves state at f32 precision") {
    namespace fs = std::filesystem;
    ArchDescriptor a = small_arch();
    TrainCheckpoint ck;
    ck.student = make_model(a, ModelKind::Segmenter, 3);
    ck.teacher = make_model(a, ModelKind::Segmenter, 4);
    ck.prn = make_model(a, ModelKind::PrnDecoder, 5);
    ck.opt_student = OptimState(ck.student.params.size());
    ck.opt_prn = OptimState(ck.prn.params.size());
    Rng rng(9);
    for (double& v : ck.opt_student.m) v = rng.uniform(-1, 1);
    ck.opt_student.step = 42;
    ck.step = 1234;
    ck.ema_beta = 0.999;

    const std::string path = (fs::temp_directory_path() / "prnuda_ckpt_test.bin").string();
    save_checkpoint(path, ck);
    TrainCheckpoint back = load_checkpoint(path);
    CHECK(back.step == 1234);
    CHECK(back.ema_beta == doctest::Approx(0.999));
    CHECK(back.opt_student.step == 42);
    CHECK(back.student.arch == a);
    REQUIRE(back.student.params.size() == ck.student.params.size());
    for (std::size_t i = 0; i < ck.student.params.size(); ++i)
        CHECK(back.student.params[i] ==
              doctest::Approx(ck.student.params[i]).epsilon(1e-6));
    for (std::size_t i = 0; i < ck.opt_student.m.size(); ++i)
        CHECK(back.opt_student.m[i] ==
              doctest::Approx(ck.opt_student.m[i]).epsilon(1e-6));
    fs::remove(path);
}

TEST_CASE("checkpoint rejects a bad version tag") {
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "prnuda_bad_ckpt.bin").string();
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        std::fputs("not-a-checkpoint\n", f);
        std::fclose(f);
    }
    CHECK_THROWS(load_checkpoint(path));
    fs::remove(path);
}

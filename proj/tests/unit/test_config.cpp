#include <doctest.h>

#include "prnuda/config.hpp"

using namespace prnuda;

TEST_CASE("defaults carry the published hyperparameters") {
    RunConfig cfg;
    CHECK(cfg.lr_encoder == doctest::Approx(6e-5));
    CHECK(cfg.lr_decoder == doctest::Approx(6e-4));
    CHECK(cfg.adam_beta1 == doctest::Approx(0.9));
    CHECK(cfg.adam_beta2 == doctest::Approx(0.999));
    CHECK(cfg.weight_decay == doctest::Approx(0.01));
    CHECK(cfg.ema_beta == doctest::Approx(0.999));
    CHECK(cfg.tau2 == doctest::Approx(0.968));
    CHECK(cfg.lambda1 == doctest::Approx(0.1));
    CHECK(cfg.lambda2 == doctest::Approx(25.0));
    CHECK(cfg.prn_eps_min == doctest::Approx(0.05));
    CHECK(cfg.prn_eps_max == doctest::Approx(0.2));
    CHECK(cfg.fa_eps == doctest::Approx(0.005));
    CHECK(cfg.total_steps == 3000);
    CHECK(cfg.effective_warmup() == 300);  // scaled for short runs
    RunConfig longer = cfg;
    longer.total_steps = 40000;
    CHECK(longer.effective_warmup() == 1500);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config text roundtrips and comments parse") {
    RunConfig cfg;
    cfg.lambda2 = 17.5;
    cfg.sw.fa = false;
    cfg.data_root = "some/where";
    const std::string text = config_to_text(cfg);
    RunConfig back = parse_config_text(text);
    CHECK(back.lambda2 == doctest::Approx(17.5));
    CHECK(back.sw.fa == false);
    CHECK(back.data_root == "some/where");

    RunConfig commented = parse_config_text(
        "# a comment\nloss.lambda1 = 0.4   # trailing comment\n\nswitch.cl = off\n");
    CHECK(commented.lambda1 == doctest::Approx(0.4));
    CHECK(commented.sw.cl == false);
}

TEST_CASE("unknown keys and malformed lines are rejected") {
    CHECK_THROWS_AS(parse_config_text("no.such.key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("loss.lambda1 0.4\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("loss.lambda1 = abc\n"), std::invalid_argument);
    RunConfig cfg;
    CHECK_THROWS_AS(apply_override(cfg, "bogus", "1"), std::invalid_argument);
}

TEST_CASE("ablation lattice is enforced at validate time") {
    RunConfig cfg;
    cfg.sw = {false, true, false, false, false};  // prn without st
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg.sw = {true, false, true, false, false};  // nm without prn
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg.sw = {true, true, true, true, true};
    CHECK_NOTHROW(cfg.validate());
    cfg.sw = {true, false, false, true, false};  // CL w/o R is a valid row
    CHECK_NOTHROW(cfg.validate());
    cfg.sw = {false, false, false, false, false};  // source-only
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("row names mirror the ablation table") {
    AblationSwitches sw{false, false, false, false, false};
    CHECK(sw.row_name() == "source-only");
    sw = {true, false, false, false, false};
    CHECK(sw.row_name() == "ST");
    sw = {true, true, true, false, false};
    CHECK(sw.row_name() == "ST+PRN+NM");
    sw = {true, true, true, true, true};
    CHECK(sw.row_name() == "ST+PRN+NM+CL/R+FA");
}

TEST_CASE("out-of-range values are rejected") {
    RunConfig cfg;
    cfg.tau2 = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    cfg.prn_eps_min = 0.3;
    cfg.prn_eps_max = 0.2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    cfg.zeta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

#pragma once

#include <cstdint>
#include <string>

#include "prnuda/data.hpp"
#include "prnuda/model.hpp"

namespace prnuda {

// Table-3-style component switches. Valid combinations form a lattice:
// prn requires st, nm requires prn (cl with prn is "CL w/ R").
struct AblationSwitches {
    bool st = true;
    bool prn = true;
    bool nm = true;
    bool cl = true;
    bool fa = true;

    std::string row_name() const;
};

struct RunConfig {
    // model
    int num_classes = 5;
    int enc_w1 = 16, enc_w2 = 32, enc_w3 = 64, prn_width = 64;

    // optimization
    double lr_encoder = 6e-5;
    double lr_decoder = 6e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double weight_decay = 0.01;
    long total_steps = 3000;
    long warmup_steps = -1;  // -1: 1500, scaled to 300 when total < 6000
    double warmup_factor = 1e-6;
    double ema_beta = 0.999;

    // self-training / PRN. tau1 is calibrated for from-scratch desk-scale
    // models whose max-softmax rarely leaves [0.3, 0.9]; the DAFormer-style
    // 0.968 never fires here and disables self-training outright.
    double tau1 = 0.6;
    double tau2 = 0.968;
    double prn_eps_min = 0.05;
    double prn_eps_max = 0.2;
    double lambda1 = 0.1;
    double lambda2 = 25.0;
    double fa_eps = 0.005;

    // contrastive
    double zeta = 0.1;
    int anchors_per_class = 16;
    int max_negatives = 128;

    // augmentation
    double jitter_strength = 0.2;
    double jitter_prob = 0.5;
    double blur_prob = 0.5;
    double blur_sigma_min = 0.15;
    double blur_sigma_max = 1.15;
    double classmix_fraction = 0.5;

    // data (synthetic benchmark unless data_root set)
    int image_size = 64;
    int shapes_per_image = 6;
    int source_count = 200;
    int target_count = 200;
    int val_count = 50;
    DomainStyle source_style{0.0, 1.0, 1.0, 0.01};
    DomainStyle target_style{60.0, 0.6, 1.4, 0.03};
    std::string data_root;  // folder mode: <root>/{source,target,target_val}

    // run
    std::uint64_t seed = 1;
    long log_every = 50;
    long eval_every = 500;
    long checkpoint_every = 1000;
    std::string out_dir;

    AblationSwitches sw;

    long effective_warmup() const {
        if (warmup_steps >= 0) return warmup_steps;
        return total_steps < 6000 ? 300 : 1500;
    }
    ArchDescriptor arch() const {
        ArchDescriptor a;
        a.in_channels = 3;
        a.num_classes = num_classes;
        a.enc_w1 = enc_w1;
        a.enc_w2 = enc_w2;
        a.enc_w3 = enc_w3;
        a.prn_width = prn_width;
        return a;
    }
    SynthConfig synth() const {
        SynthConfig s;
        s.image_size = image_size;
        s.num_classes = num_classes;
        s.shapes_per_image = shapes_per_image;
        s.source_style = source_style;
        s.target_style = target_style;
        s.rng_seed = seed;
        return s;
    }

    // Throws std::invalid_argument on invalid values or switch combinations.
    void validate() const;
};

// Flat "section.key = value" text format; '#' starts a comment. Unknown keys
// are rejected. Every key has a default, so an empty file is a valid config.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string config_to_text(const RunConfig& cfg);

// Applies a single "key=value" override (CLI flags beat file values).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace prnuda

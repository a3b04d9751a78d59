#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prnuda/config.hpp"
#include "prnuda/data.hpp"
#include "prnuda/gradcheck.hpp"
#include "prnuda/image_io.hpp"
#include "prnuda/runner.hpp"

namespace fs = std::filesystem;
using namespace prnuda;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    long steps = -1;
    long seed = -1;
};

RunConfig build_config(const CommonOpts& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config_file(o.config_path);
    for (const std::string& kv : o.overrides) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got: " + kv);
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.steps >= 0) cfg.total_steps = o.steps;
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("-c,--config", o.config_path, "flat key=value config file");
    cmd->add_option("--set", o.overrides, "override a config key (key=value, repeatable)");
    cmd->add_option("-o,--out", o.out_dir, "output directory");
    cmd->add_option("--steps", o.steps, "override opt.total_steps");
    cmd->add_option("--seed", o.seed, "override run.seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-training UDA segmentation with pseudo-label refinement"};
    app.require_subcommand(1);

    CommonOpts train_opts;
    bool flag_no_st = false, flag_no_prn = false, flag_no_nm = false;
    bool flag_no_cl = false, flag_no_fa = false;
    auto* train = app.add_subcommand("train", "train on the configured benchmark");
    add_common(train, train_opts);
    train->add_flag("--no-st", flag_no_st, "disable self-training (source-only)");
    train->add_flag("--no-prn", flag_no_prn, "disable pseudo-label refinement");
    train->add_flag("--no-nm", flag_no_nm, "disable noise-mask prediction");
    train->add_flag("--no-cl", flag_no_cl, "disable contrastive learning");
    train->add_flag("--no-fa", flag_no_fa, "disable Fourier style adaptation");

    CommonOpts eval_opts;
    std::string eval_ckpt;
    bool eval_overlays = false;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the val split");
    add_common(eval, eval_opts);
    eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
    eval->add_flag("--overlays", eval_overlays, "write per-image overlay PNGs");

    CommonOpts pd_opts;
    double pd_eps = 0.1;
    auto* pdemo = app.add_subcommand("perturb-demo",
                                     "render original/perturbed label maps and the GT noise mask");
    add_common(pdemo, pd_opts);
    pdemo->add_option("--eps", pd_eps, "perturbation strength");

    CommonOpts fd_opts;
    double fd_eps = 0.005;
    auto* fdemo = app.add_subcommand("fda-demo", "render a source image translated to target style");
    add_common(fdemo, fd_opts);
    fdemo->add_option("--eps", fd_eps, "low-frequency mask strength");

    bool gc_corrupt = false;
    auto* gcheck = app.add_subcommand("gradcheck",
                                      "finite-difference checks for all loss terms");
    gcheck->add_flag("--corrupt", gc_corrupt,
                     "inject a gradient error (negative-control fixture)");

    CommonOpts gd_opts;
    bool gd_target_labels = false;
    auto* gdata = app.add_subcommand("gen-data", "write the synthetic benchmark to folders");
    add_common(gdata, gd_opts);
    gdata->add_flag("--with-target-labels", gd_target_labels,
                    "also write labels for the target train split");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            RunConfig cfg = build_config(train_opts);
            // --no-* flags degrade their dependents; config-file combinations
            // are validated strictly by run_train
            if (flag_no_st) cfg.sw = {false, false, false, false, false};
            if (flag_no_prn) cfg.sw.prn = cfg.sw.nm = false;
            if (flag_no_nm) cfg.sw.nm = false;
            if (flag_no_cl) cfg.sw.cl = false;
            if (flag_no_fa) cfg.sw.fa = false;
            RunResult res = run_train(cfg);
            std::cout << "run dir: " << res.run_dir << "\n"
                      << "row: " << cfg.sw.row_name() << "\n"
                      << "final target-val mIoU: " << res.final_eval.metrics.miou << "\n";
            if (res.final_eval.has_mask_metrics)
                std::cout << "noise-mask F1: " << res.final_eval.metrics.mask_f1 << "\n";
        } else if (*eval) {
            RunConfig cfg = build_config(eval_opts);
            std::string out = cfg.out_dir.empty() ? "eval_out" : cfg.out_dir;
            EvalOutcome ev = run_eval(eval_ckpt, cfg, out, eval_overlays);
            std::cout << "mIoU: " << ev.metrics.miou << "\n";
            if (ev.has_mask_metrics) {
                std::cout << "noise-mask P/R/F1: " << ev.metrics.mask_precision << " / "
                          << ev.metrics.mask_recall << " / " << ev.metrics.mask_f1 << "\n"
                          << "pseudo-label accuracy on clean pixels: "
                          << ev.metrics.pseudo_accuracy_clean << "\n";
            }
        } else if (*pdemo) {
            RunConfig cfg = build_config(pd_opts);
            std::string out = cfg.out_dir.empty() ? "perturb_demo" : cfg.out_dir;
            perturb_demo(cfg, out, pd_eps);
            std::cout << "wrote " << out << "\n";
        } else if (*fdemo) {
            RunConfig cfg = build_config(fd_opts);
            std::string out = cfg.out_dir.empty() ? "fda_demo" : cfg.out_dir;
            fda_demo(cfg, out, fd_eps);
            std::cout << "wrote " << out << "\n";
        } else if (*gcheck) {
            auto entries = run_gradcheck(gc_corrupt);
            bool all_pass = true;
            std::printf("%-16s %14s  %s\n", "loss", "max_rel_err", "status");
            for (const auto& e : entries) {
                std::printf("%-16s %14.3e  %s\n", e.loss_name.c_str(), e.max_rel_err,
                            e.pass ? "ok" : "FAIL");
                all_pass = all_pass && e.pass;
            }
            return all_pass ? 0 : 1;
        } else if (*gdata) {
            RunConfig cfg = build_config(gd_opts);
            std::string out = cfg.out_dir.empty() ? "dataset" : cfg.out_dir;
            const SynthConfig sc = cfg.synth();
            auto src = gen_synthetic(sc, cfg.source_count, Domain::Source, 0x11);
            auto tgt = gen_synthetic(sc, cfg.target_count, Domain::Target, 0x22);
            auto val = gen_synthetic(sc, cfg.val_count, Domain::Target, 0x33);
            write_dataset((fs::path(out) / "source").string(), src, cfg.num_classes);
            if (gd_target_labels) {
                write_dataset((fs::path(out) / "target").string(), tgt, cfg.num_classes);
            } else {
                std::vector<Sample> unlabeled = tgt;
                fs::create_directories(fs::path(out) / "target" / "images");
                const Palette pal = default_palette(cfg.num_classes);
                (void)pal;
                char name[32];
                for (std::size_t i = 0; i < unlabeled.size(); ++i) {
                    std::snprintf(name, sizeof(name), "im_%05zu.png", i);
                    write_image((fs::path(out) / "target" / "images" / name).string(),
                                unlabeled[i].image);
                }
            }
            write_dataset((fs::path(out) / "target_val").string(), val, cfg.num_classes);
            for (const char* split : {"source", "target", "target_val"}) {
                DatasetManifest m =
                    load_folder((fs::path(out) / split).string(), cfg.num_classes, kIgnoreLabel);
                std::ofstream mf(fs::path(out) / split / "manifest.json");
                mf << manifest_to_json(m) << "\n";
            }
            std::cout << "wrote " << out << "\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}

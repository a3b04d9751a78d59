#include "prnuda/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "prnuda/checkpoint.hpp"
#include "prnuda/image_io.hpp"
#include "prnuda/numerics.hpp"
#include "prnuda/rng.hpp"
#include "prnuda/spectral.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace prnuda {
namespace {

// disjoint scene streams per split
constexpr std::uint64_t kSourceSalt = 0x11;
constexpr std::uint64_t kTargetSalt = 0x22;
constexpr std::uint64_t kValSalt = 0x33;

std::vector<Sample> load_required(const std::string& root, int k, bool need_labels,
                                  const char* what) {
    DatasetManifest m = load_folder(root, k, kIgnoreLabel);
    if (!m.rejected.empty()) {
        std::ostringstream os;
        os << what << ": dataset validation failed:";
        for (const auto& r : m.rejected) os << "\n  " << r;
        throw std::runtime_error(os.str());
    }
    if (m.entries.empty())
        throw std::runtime_error(std::string(what) + ": no entries under " + root);
    if (need_labels)
        for (const auto& e : m.entries)
            if (e.label_path.empty())
                throw std::runtime_error(std::string(what) + ": unlabeled entry " +
                                         e.image_path);
    return load_dataset(m);
}

json report_to_json(long step, double lr_e, double lr_d, const LossReport& r) {
    return json{{"step", step},
                {"lr_encoder", lr_e},
                {"lr_decoder", lr_d},
                {"source_ce", r.source_ce},
                {"target_ce", r.target_ce},
                {"contrastive", r.contrastive},
                {"prn_source_ce", r.prn_source_ce},
                {"prn_source_bce", r.prn_source_bce},
                {"prn_target_ce", r.prn_target_ce},
                {"prn_target_bce", r.prn_target_bce},
                {"total_student", r.total_student},
                {"total_prn", r.total_prn},
                {"eta_bar", r.eta_bar},
                {"noise_density", r.noise_density}};
}

TrainCheckpoint to_checkpoint(const TrainerState& s) {
    return {s.student,     s.teacher.model, s.prn, s.opt_student, s.opt_prn,
            s.teacher.beta, s.step};
}

Grid2D label_to_rgb(const LabelMap& lbl, const Palette& pal) {
    Grid2D img(3, lbl.height, lbl.width);
    for (int y = 0; y < lbl.height; ++y)
        for (int x = 0; x < lbl.width; ++x) {
            int v = lbl.at(y, x);
            const auto& c = (v >= 0 && v < static_cast<int>(pal.size()))
                                ? pal[v]
                                : std::array<std::uint8_t, 3>{0, 0, 0};
            img.at(0, y, x) = c[0] / 255.0;
            img.at(1, y, x) = c[1] / 255.0;
            img.at(2, y, x) = c[2] / 255.0;
        }
    return img;
}

Grid2D hconcat(const std::vector<const Grid2D*>& parts) {
    int w = 0;
    for (auto* p : parts) w += p->width;
    Grid2D out(3, parts[0]->height, w);
    int x0 = 0;
    for (auto* p : parts) {
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < p->height; ++y)
                for (int x = 0; x < p->width; ++x) out.at(c, y, x0 + x) = p->at(c, y, x);
        x0 += p->width;
    }
    return out;
}

}  // namespace

std::string default_run_root() {
    if (const char* env = std::getenv("PRNUDA_RUN_ROOT")) return env;
    return "runs";
}

DatasetBundle prepare_data(const RunConfig& cfg) {
    DatasetBundle d;
    if (!cfg.data_root.empty()) {
        d.source_train = load_required((fs::path(cfg.data_root) / "source").string(),
                                       cfg.num_classes, true, "source");
        d.target_train = load_required((fs::path(cfg.data_root) / "target").string(),
                                       cfg.num_classes, false, "target");
        d.target_val = load_required((fs::path(cfg.data_root) / "target_val").string(),
                                     cfg.num_classes, true, "target_val");
        return d;
    }
    const SynthConfig sc = cfg.synth();
    d.source_train = gen_synthetic(sc, cfg.source_count, Domain::Source, kSourceSalt);
    d.target_train = gen_synthetic(sc, cfg.target_count, Domain::Target, kTargetSalt);
    d.target_val = gen_synthetic(sc, cfg.val_count, Domain::Target, kValSalt);
    return d;
}

EvalOutcome evaluate(const ModelState& student, const TeacherState* teacher,
                     const ModelState* prn, bool use_noise_mask,
                     const std::vector<Sample>& val, int num_classes) {
    EvalOutcome out;
    std::vector<LabelMap> preds, gts;
    preds.reserve(val.size());
    gts.reserve(val.size());

    long tp = 0, fp = 0, fn = 0;
    long clean_correct = 0, clean_total = 0;
    std::vector<double> etas, accs;

    for (const Sample& s : val) {
        FeatureMap f = encode(student, s.image);
        preds.push_back(argmax_labels(decode(student, f)));
        gts.push_back(s.label);

        if (teacher && prn) {
            FeatureMap tf = encode(teacher->model, s.image);
            Grid2D tlogits = decode(teacher->model, tf);
            LabelMap y_hat = argmax_labels(tlogits);
            PrnOutput refined = prn_decode(*prn, tf, tlogits);
            NoiseMask mu(s.image.height, s.image.width);
            for (std::size_t j = 0; j < mu.size(); ++j)
                mu.data[j] = refined.noise_logits.data[j] > 0.0 ? 1 : 0;

            long img_correct = 0, img_total = 0;
            for (std::size_t j = 0; j < mu.size(); ++j) {
                const int g = s.label.data[j];
                if (g == kIgnoreLabel) continue;
                const bool err = (y_hat.data[j] != g);
                const bool pred_noisy = mu.data[j] != 0;
                tp += (pred_noisy && err);
                fp += (pred_noisy && !err);
                fn += (!pred_noisy && err);
                if (!pred_noisy) {
                    ++clean_total;
                    clean_correct += !err;
                }
                ++img_total;
                img_correct += !err;
            }
            etas.push_back(use_noise_mask
                               ? confidence_mask(mu)
                               : confidence_threshold(softmax_channels(tlogits), 0.968));
            accs.push_back(img_total > 0 ? static_cast<double>(img_correct) / img_total
                                         : 0.0);
        }
    }

    out.metrics = miou(preds, gts, num_classes, kIgnoreLabel);
    if (teacher && prn) {
        out.has_mask_metrics = true;
        out.metrics.mask_precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 1.0;
        out.metrics.mask_recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;
        const double pr = out.metrics.mask_precision + out.metrics.mask_recall;
        out.metrics.mask_f1 =
            pr > 0.0 ? 2.0 * out.metrics.mask_precision * out.metrics.mask_recall / pr : 0.0;
        out.metrics.pseudo_accuracy_clean =
            clean_total > 0 ? static_cast<double>(clean_correct) / clean_total : 0.0;
        bool flat = true;
        for (double v : etas)
            if (v != etas.front()) flat = false;
        out.eta_spearman = (etas.size() >= 2 && !flat) ? spearman(etas, accs) : 0.0;
    }
    return out;
}

RunResult run_train(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    cfg.validate();
    if (cfg.out_dir.empty()) {
        std::ostringstream os;
        os << default_run_root() << "/" << cfg.sw.row_name() << "-seed" << cfg.seed;
        cfg.out_dir = os.str();
    }
    fs::create_directories(cfg.out_dir);

    DatasetBundle data = prepare_data(cfg);

    {
        std::ofstream snap(fs::path(cfg.out_dir) / "config.txt");
        snap << config_to_text(cfg);
    }
    std::ofstream metrics_out(fs::path(cfg.out_dir) / "metrics.jsonl");
    std::ofstream eval_out(fs::path(cfg.out_dir) / "eval.jsonl");

    TrainerState state = make_trainer(cfg);
    LrSchedule sched{cfg.effective_warmup(), cfg.total_steps, cfg.warmup_factor};

    const int n_src = static_cast<int>(data.source_train.size());
    const int n_tgt = static_cast<int>(data.target_train.size());

    for (long step = 0; step < cfg.total_steps; ++step) {
        Rng batch_rng(Rng::mix(Rng::mix(cfg.seed, static_cast<std::uint64_t>(step)), 6));
        const int si = batch_rng.uniform_int(n_src);
        const int ti = batch_rng.uniform_int(n_tgt);
        StepBatch batch{&data.source_train[si].image, &data.source_train[si].label,
                        &data.target_train[ti].image, step};
        LossReport r = train_step(state, batch, cfg);

        if ((step + 1) % cfg.log_every == 0 || step + 1 == cfg.total_steps) {
            metrics_out << report_to_json(step, lr_at(step, cfg.lr_encoder, sched),
                                          lr_at(step, cfg.lr_decoder, sched), r)
                               .dump()
                        << "\n";
        }
        const bool do_eval =
            (step + 1) % cfg.eval_every == 0 || step + 1 == cfg.total_steps;
        if (do_eval) {
            EvalOutcome ev = evaluate(state.student, cfg.sw.prn ? &state.teacher : nullptr,
                                      cfg.sw.prn ? &state.prn : nullptr, cfg.sw.nm,
                                      data.target_val, cfg.num_classes);
            json j{{"step", step},
                   {"miou", ev.metrics.miou},
                   {"empty", ev.metrics.empty}};
            if (ev.has_mask_metrics) {
                j["mask_f1"] = ev.metrics.mask_f1;
                j["mask_precision"] = ev.metrics.mask_precision;
                j["mask_recall"] = ev.metrics.mask_recall;
                j["pseudo_accuracy_clean"] = ev.metrics.pseudo_accuracy_clean;
                j["eta_spearman"] = ev.eta_spearman;
            }
            eval_out << j.dump() << "\n";
        }
        if (cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0 &&
            step + 1 != cfg.total_steps) {
            std::ostringstream name;
            name << "ckpt_step" << (step + 1) << ".bin";
            save_checkpoint((fs::path(cfg.out_dir) / name.str()).string(),
                            to_checkpoint(state));
        }
    }

    save_checkpoint((fs::path(cfg.out_dir) / "ckpt_final.bin").string(),
                    to_checkpoint(state));

    EvalOutcome final_eval =
        evaluate(state.student, cfg.sw.prn ? &state.teacher : nullptr,
                 cfg.sw.prn ? &state.prn : nullptr, cfg.sw.nm, data.target_val,
                 cfg.num_classes);

    json summary;
    summary["row"] = cfg.sw.row_name();
    summary["switches"] = {{"st", cfg.sw.st},
                           {"prn", cfg.sw.prn},
                           {"nm", cfg.sw.nm},
                           {"cl", cfg.sw.cl},
                           {"fa", cfg.sw.fa}};
    summary["steps"] = cfg.total_steps;
    summary["seed"] = cfg.seed;
    summary["miou"] = final_eval.metrics.miou;
    summary["per_class_iou"] = json::array();
    for (double v : final_eval.metrics.per_class_iou)
        summary["per_class_iou"].push_back(std::isnan(v) ? json() : json(v));
    if (final_eval.has_mask_metrics) {
        summary["mask_f1"] = final_eval.metrics.mask_f1;
        summary["mask_precision"] = final_eval.metrics.mask_precision;
        summary["mask_recall"] = final_eval.metrics.mask_recall;
        summary["pseudo_accuracy_clean"] = final_eval.metrics.pseudo_accuracy_clean;
        summary["eta_spearman"] = final_eval.eta_spearman;
    }
    {
        std::ofstream sum(fs::path(cfg.out_dir) / "summary.json");
        sum << summary.dump(2) << "\n";
    }
    return {cfg.out_dir, final_eval};
}

EvalOutcome run_eval(const std::string& ckpt_path, const RunConfig& cfg,
                     const std::string& out_dir, bool overlays) {
    TrainCheckpoint ckpt = load_checkpoint(ckpt_path);
    if (!(ckpt.student.arch == cfg.arch())) {
        throw std::runtime_error("run_eval: arch mismatch\n  checkpoint: " +
                                 ckpt.student.arch.describe() +
                                 "\n  config:     " + cfg.arch().describe());
    }
    DatasetBundle data = prepare_data(cfg);
    if (data.target_val.empty()) throw std::runtime_error("run_eval: empty manifest");

    TeacherState teacher{ckpt.teacher, ckpt.ema_beta};
    EvalOutcome out = evaluate(ckpt.student, &teacher, &ckpt.prn, true, data.target_val,
                               cfg.num_classes);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        if (overlays) {
            const Palette pal = default_palette(cfg.num_classes);
            fs::create_directories(fs::path(out_dir) / "overlays");
            for (std::size_t i = 0; i < data.target_val.size(); ++i) {
                const Sample& s = data.target_val[i];
                LabelMap pred = argmax_labels(decode(ckpt.student, encode(ckpt.student, s.image)));
                Grid2D pr = label_to_rgb(pred, pal);
                Grid2D gt = label_to_rgb(s.label, pal);
                Grid2D row = hconcat({&s.image, &pr, &gt});
                std::ostringstream name;
                name << "val_" << i << ".png";
                write_image((fs::path(out_dir) / "overlays" / name.str()).string(), row);
            }
        }
        json j{{"checkpoint", ckpt_path},
               {"step", ckpt.step},
               {"miou", out.metrics.miou},
               {"mask_f1", out.metrics.mask_f1},
               {"pseudo_accuracy_clean", out.metrics.pseudo_accuracy_clean},
               {"eta_spearman", out.eta_spearman}};
        std::ofstream sum(fs::path(out_dir) / "eval_summary.json");
        sum << j.dump(2) << "\n";
    }
    return out;
}

void perturb_demo(const RunConfig& cfg, const std::string& out_dir, double eps) {
    fs::create_directories(out_dir);
    const SynthConfig sc = cfg.synth();
    Sample src = gen_synthetic(sc, 1, Domain::Source, kSourceSalt)[0];
    Sample tgt = gen_synthetic(sc, 1, Domain::Target, kTargetSalt)[0];

    ModelState model = make_model(cfg.arch(), ModelKind::Segmenter, cfg.seed);
    Grid2D l_src = decode(model, encode(model, src.image));
    Grid2D l_tgt = decode(model, encode(model, tgt.image));

    double residue = 0.0;
    Grid2D pert = perturb_logits(l_src, l_tgt, eps, &residue);
    NoiseMask gt = make_noise_mask_gt(l_src, pert);

    const Palette pal = default_palette(cfg.num_classes);
    write_image((fs::path(out_dir) / "source.png").string(), src.image);
    write_image((fs::path(out_dir) / "target.png").string(), tgt.image);
    write_label_png((fs::path(out_dir) / "labels_original.png").string(),
                    argmax_labels(l_src), pal);
    write_label_png((fs::path(out_dir) / "labels_perturbed.png").string(),
                    argmax_labels(pert), pal);
    write_mask_png((fs::path(out_dir) / "noise_mask_gt.png").string(), gt);

    json j{{"eps", eps},
           {"imag_residue", residue},
           {"noise_density",
            static_cast<double>(gt.count_ones()) / static_cast<double>(gt.size())}};
    std::ofstream info(fs::path(out_dir) / "info.json");
    info << j.dump(2) << "\n";
}

void fda_demo(const RunConfig& cfg, const std::string& out_dir, double eps) {
    fs::create_directories(out_dir);
    const SynthConfig sc = cfg.synth();
    Sample src = gen_synthetic(sc, 1, Domain::Source, kSourceSalt)[0];
    Sample tgt = gen_synthetic(sc, 1, Domain::Target, kTargetSalt)[0];
    Grid2D translated = fda_image(src.image, tgt.image, eps);
    write_image((fs::path(out_dir) / "source.png").string(), src.image);
    write_image((fs::path(out_dir) / "target.png").string(), tgt.image);
    write_image((fs::path(out_dir) / "translated.png").string(), translated);
}

}  // namespace prnuda

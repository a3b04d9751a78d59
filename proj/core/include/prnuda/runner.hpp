#pragma once

#include <string>
#include <vector>

#include "prnuda/config.hpp"
#include "prnuda/metrics.hpp"
#include "prnuda/selftrain.hpp"

namespace prnuda {

struct DatasetBundle {
    std::vector<Sample> source_train;
    std::vector<Sample> target_train;  // labels present only for synthetic data
    std::vector<Sample> target_val;
};

// Synthetic benchmark, or folder mode when cfg.data_root is set
// (<root>/{source,target,target_val}). Any rejected file aborts.
DatasetBundle prepare_data(const RunConfig& cfg);

struct EvalOutcome {
    MetricsRecord metrics;
    double eta_spearman = 0.0;  // η̄ vs per-image teacher pseudo-label accuracy
    bool has_mask_metrics = false;
};

// Student mIoU on val; when teacher+prn are given, noise-mask quality against
// the teacher pseudo-label error and the η̄/accuracy rank correlation.
EvalOutcome evaluate(const ModelState& student, const TeacherState* teacher,
                     const ModelState* prn, bool use_noise_mask,
                     const std::vector<Sample>& val, int num_classes);

struct RunResult {
    std::string run_dir;
    EvalOutcome final_eval;
};

// Full training run: config snapshot, JSONL metrics, periodic checkpoints,
// final eval and a Table-3-style summary row.
RunResult run_train(const RunConfig& cfg);

// Deterministic evaluation of a checkpoint; refuses on arch mismatch.
EvalOutcome run_eval(const std::string& ckpt_path, const RunConfig& cfg,
                     const std::string& out_dir, bool overlays);

// Demo artifacts (indexed PNGs) for the spectral machinery.
void perturb_demo(const RunConfig& cfg, const std::string& out_dir, double eps);
void fda_demo(const RunConfig& cfg, const std::string& out_dir, double eps);

std::string default_run_root();

}  // namespace prnuda

#pragma once

#include <string>

#include "prnuda/model.hpp"
#include "prnuda/optimizer.hpp"

namespace prnuda {

inline constexpr const char* kCheckpointTag = "prnuda-ckpt-v1";

// Full training state: student θ, teacher φ, PRN σ, both optimizers, step.
struct TrainCheckpoint {
    ModelState student;
    ModelState teacher;
    ModelState prn;
    OptimState opt_student;
    OptimState opt_prn;
    double ema_beta = 0.999;
    long step = 0;
};

// Self-describing container: tag line, JSON header (arch descriptor, layout
// table, section table), then raw 32-bit little-endian payloads.
void save_checkpoint(const std::string& path, const TrainCheckpoint& ckpt);
TrainCheckpoint load_checkpoint(const std::string& path);

}  // namespace prnuda

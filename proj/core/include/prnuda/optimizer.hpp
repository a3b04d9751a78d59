#pragma once

#include <cstddef>
#include <vector>

namespace prnuda {

// Adam first/second moments; shared step counter across learning-rate groups.
struct OptimState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    explicit OptimState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

struct AdamWConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

struct LrGroup {
    std::size_t offset = 0;
    std::size_t count = 0;
    double lr = 0.0;
};

// Decoupled-weight-decay Adam with bias correction. Increments o.step once,
// then updates each group's range with its own rate. Throws on non-finite
// gradients.
void adamw_step(std::vector<double>& params, const std::vector<double>& grad,
                OptimState& o, const std::vector<LrGroup>& groups,
                const AdamWConfig& cfg);

// Single-group convenience overload.
void adamw_step(std::vector<double>& params, const std::vector<double>& grad,
                OptimState& o, double lr, const AdamWConfig& cfg);

struct LrSchedule {
    long warmup_steps = 1500;
    long total_steps = 40000;
    double warmup_factor = 1e-6;  // multiplier ramped linearly up to 1
};

// Linear warmup from base*warmup_factor to base over [0, warmup], then linear
// decay to 0 at total_steps.
double lr_at(long step, double base, const LrSchedule& s);

}  // namespace prnuda

#include "prnuda/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace prnuda {

void adamw_step(std::vector<double>& params, const std::vector<double>& grad,
                OptimState& o, const std::vector<LrGroup>& groups,
                const AdamWConfig& cfg) {
    if (grad.size() != params.size() || o.m.size() != params.size())
        throw std::invalid_argument("adamw_step: length mismatch");
    o.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(o.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(o.step));
    for (const LrGroup& g : groups) {
        for (std::size_t i = g.offset; i < g.offset + g.count; ++i) {
            const double gi = grad[i];
            if (!std::isfinite(gi)) throw std::runtime_error("adamw_step: non-finite gradient");
            o.m[i] = cfg.beta1 * o.m[i] + (1.0 - cfg.beta1) * gi;
            o.v[i] = cfg.beta2 * o.v[i] + (1.0 - cfg.beta2) * gi * gi;
            const double mhat = o.m[i] / bc1;
            const double vhat = o.v[i] / bc2;
            params[i] -= g.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * params[i]);
        }
    }
}

void adamw_step(std::vector<double>& params, const std::vector<double>& grad,
                OptimState& o, double lr, const AdamWConfig& cfg) {
    adamw_step(params, grad, o, {{0, params.size(), lr}}, cfg);
}

double lr_at(long step, double base, const LrSchedule& s) {
    if (step < 0) throw std::invalid_argument("lr_at: negative step");
    if (s.warmup_steps > 0 && step < s.warmup_steps) {
        const double t = static_cast<double>(step) / static_cast<double>(s.warmup_steps);
        return base * (s.warmup_factor + (1.0 - s.warmup_factor) * t);
    }
    if (s.total_steps <= s.warmup_steps) return base;
    const double t = static_cast<double>(step - s.warmup_steps) /
                     static_cast<double>(s.total_steps - s.warmup_steps);
    return base * std::max(0.0, 1.0 - t);
}

}  // namespace prnuda

#pragma once

#include <cstdint>
#include <vector>

#include "msda/nn/mlp.hpp"

namespace msda::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Bias-corrected first/second-moment state, shaped like its parameter group.
struct AdamState {
    AdamConfig config;
    Gradients first_moment;
    Gradients second_moment;
    std::int64_t step = 0;

    static AdamState init(const Mlp& params, const AdamConfig& config);
};

// One update: params <- params - lr * m_hat / (sqrt(v_hat) + eps).
// Deterministic; throws NumericError (with the layer index) on non-finite
// gradients and validates that parameters stay finite.
void opt_step(Mlp& params, const Gradients& grads, AdamState& state);

} // namespace msda::nn

#pragma once

#include <cstddef>
#include <vector>

#include "lsta/network.hpp"

namespace lsta {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 1e-3;
    double momentum = 0.0;  // sgd
    double beta1 = 0.9;     // adam
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 5.0;  // <= 0 disables clipping
};

// Moment buffers, one flat array per parameter block, in block order.
struct OptimizerState {
    std::vector<std::vector<double>> m;  // first moment / velocity
    std::vector<std::vector<double>> v;  // second moment (adam only)
    std::size_t step = 0;
};

OptimizerState make_optimizer_state(const OptimizerConfig& cfg, SequenceModel& model);

// Scales every gradient scalar by max_norm/norm when the global L2 norm
// exceeds max_norm. Returns the applied scale (1 when no clipping happened).
double clip_global_norm(ModelGrads& grads, double max_norm);

void sgd_update(SequenceModel& params, ModelGrads& grads, OptimizerState& state,
                const OptimizerConfig& cfg);

void adam_update(SequenceModel& params, ModelGrads& grads, OptimizerState& state,
                 const OptimizerConfig& cfg);

// Dispatches on cfg.kind, applying clip_norm first when enabled.
void apply_update(SequenceModel& params, ModelGrads& grads, OptimizerState& state,
                  const OptimizerConfig& cfg);

}  // namespace lsta

#include "lsta/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace lsta {

OptimizerState make_optimizer_state(const OptimizerConfig& cfg, SequenceModel& model) {
    OptimizerState state;
    for (const ParamBlock& b : param_blocks(model)) {
        state.m.emplace_back(b.size, 0.0);
        if (cfg.kind == OptimizerKind::adam) state.v.emplace_back(b.size, 0.0);
    }
    return state;
}

double clip_global_norm(ModelGrads& grads, double max_norm) {
    if (max_norm <= 0.0) return 1.0;
    double sq = 0.0;
    std::vector<ParamBlock> blocks = param_blocks(grads);
    for (const ParamBlock& b : blocks)
        for (std::size_t j = 0; j < b.size; ++j) sq += b.data[j] * b.data[j];
    const double norm = std::sqrt(sq);
    if (norm <= max_norm) return 1.0;
    const double scale = max_norm / norm;
    for (const ParamBlock& b : blocks)
        for (std::size_t j = 0; j < b.size; ++j) b.data[j] *= scale;
    return scale;
}

namespace {

void check_congruent(const std::vector<ParamBlock>& p, const std::vector<ParamBlock>& g,
                     const OptimizerState& state) {
    if (p.size() != g.size() || p.size() != state.m.size())
        throw ShapeError("optimizer: params/grads/state block counts disagree");
    for (std::size_t b = 0; b < p.size(); ++b) {
        if (p[b].size != g[b].size || p[b].size != state.m[b].size())
            throw ShapeError("optimizer: block '" + p[b].name + "' shapes disagree");
    }
}

}  // namespace

void sgd_update(SequenceModel& params, ModelGrads& grads, OptimizerState& state,
                const OptimizerConfig& cfg) {
    std::vector<ParamBlock> p = param_blocks(params);
    std::vector<ParamBlock> g = param_blocks(grads);
    check_congruent(p, g, state);

    state.step += 1;
    for (std::size_t b = 0; b < p.size(); ++b) {
        std::vector<double>& vel = state.m[b];
        for (std::size_t j = 0; j < p[b].size; ++j) {
            vel[j] = cfg.momentum * vel[j] + g[b].data[j];
            p[b].data[j] -= cfg.learning_rate * vel[j];
        }
    }
}

void adam_update(SequenceModel& params, ModelGrads& grads, OptimizerState& state,
                 const OptimizerConfig& cfg) {
    std::vector<ParamBlock> p = param_blocks(params);
    std::vector<ParamBlock> g = param_blocks(grads);
    check_congruent(p, g, state);
    if (state.v.size() != state.m.size())
        throw ShapeError("adam_update: state missing second-moment buffers");

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t b = 0; b < p.size(); ++b) {
        std::vector<double>& m = state.m[b];
        std::vector<double>& v = state.v[b];
        for (std::size_t j = 0; j < p[b].size; ++j) {
            const double gj = g[b].data[j];
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            p[b].data[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
    }
}

void apply_update(SequenceModel& params, ModelGrads& grads, OptimizerState& state,
                  const OptimizerConfig& cfg) {
    clip_global_norm(grads, cfg.clip_norm);
    if (cfg.kind == OptimizerKind::sgd) {
        sgd_update(params, grads, state, cfg);
    } else {
        adam_update(params, grads, state, cfg);
    }
}

}  // namespace lsta

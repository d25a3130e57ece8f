#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "lsta/cells.hpp"
#include "lsta/linalg.hpp"

namespace lsta {

enum class CellKind { lstm, lsta, gru };
enum class Direction { forward, bidirectional };

const char* to_string(CellKind k);
const char* to_string(Direction d);

using CellParamsVariant = std::variant<LstmParams, LstaParams, GruParams>;
using CellGradsVariant = std::variant<LstmGrads, LstaGrads, GruGrads>;

// A single recurrent layer plus a softmax classifier head reading the final
// hidden state (both final states, concatenated, when bidirectional).
struct SequenceModel {
    CellKind kind = CellKind::lstm;
    Direction direction = Direction::forward;
    std::size_t hidden = 0;   // H
    std::size_t input = 0;    // D
    std::size_t classes = 0;  // K
    std::vector<CellParamsVariant> cells;  // one per direction
    Matrix head_W;  // K x H (K x 2H bidirectional)
    Vector head_b;
};

struct ModelGrads {
    std::vector<CellGradsVariant> cells;
    Matrix head_W;
    Vector head_b;
};

struct ForwardTrace {
    std::vector<std::vector<StepCache>> caches;  // per direction, one per timestep
    Vector feature;
    Vector logits;
    Vector probabilities;
};

struct GradCheckBlock {
    std::string name;
    double max_rel_err = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckBlock> blocks;
    double global_max = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Mutable flat view over every parameter scalar, in the fixed checkpoint order.
struct ParamBlock {
    std::string name;
    double* data = nullptr;
    std::size_t size = 0;
};

SequenceModel make_model(CellKind kind, Direction direction, std::size_t hidden,
                         std::size_t input, std::size_t classes, Rng& rng,
                         bool warm_start_as_lstm = false);

ModelGrads zero_grads(const SequenceModel& model);

std::vector<ParamBlock> param_blocks(SequenceModel& model);
std::vector<ParamBlock> param_blocks(ModelGrads& grads);

// sequence is T x D, one timestep per row. Initial states are zero.
ForwardTrace unroll_forward(const SequenceModel& model, const Matrix& sequence);

// loss = -log softmax(logits)[target], via log-sum-exp; d_logits = p - onehot.
struct LossResult {
    double loss = 0.0;
    Vector d_logits;
};
LossResult softmax_cross_entropy(const Vector& logits, std::size_t target);

ModelGrads bptt_backward(const SequenceModel& model, const Matrix& sequence,
                         const ForwardTrace& trace, std::size_t target);

GradCheckReport grad_check(const SequenceModel& model, const Matrix& sequence,
                           std::size_t target, double step, double threshold);

std::size_t predict(const SequenceModel& model, const Matrix& sequence);

}  // namespace lsta

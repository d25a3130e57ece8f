#pragma once

#include <cstddef>

#include "lsta/linalg.hpp"

namespace lsta {

// Parameters of a plain LSTM cell. Every gate matrix maps the concatenation
// [h_prev, x] (dim H+D) to H units.
struct LstmParams {
    std::size_t hidden = 0;  // H
    std::size_t input = 0;   // D
    Matrix W_f, W_i, W_c, W_o;
    Vector b_f, b_i, b_c, b_o;

    LstmParams() = default;
    LstmParams(std::size_t H, std::size_t D);
};

// LSTM plus the attention gate. The attention matrices map concat(f, i)
// (dim 2H) to H units.
struct LstaParams {
    LstmParams lstm;
    Matrix W_ahat, W_atil;
    Vector b_ahat, b_atil;

    LstaParams() = default;
    LstaParams(std::size_t H, std::size_t D);

    std::size_t hidden() const { return lstm.hidden; }
    std::size_t input() const { return lstm.input; }
};

// Standard GRU: update gate z, reset gate r, candidate tanh(W_h [r*h_prev, x] + b_h).
struct GruParams {
    std::size_t hidden = 0;
    std::size_t input = 0;
    Matrix W_z, W_r, W_h;
    Vector b_z, b_r, b_h;

    GruParams() = default;
    GruParams(std::size_t H, std::size_t D);
};

// h is the hidden output; c the carried cell state (zero and ignored for GRU).
// For LSTA, c is the attention-modified state.
struct CellState {
    Vector h;
    Vector c;

    CellState() = default;
    explicit CellState(std::size_t H) : h(H), c(H) {}
};

// Every intermediate of one forward step, consumed by the matching backward.
// The attention-path fields stay empty for LSTM and GRU. For LSTA, c holds the
// pre-attention state f*c_prev + i*ctil and chat the carried state c + a.
struct StepCache {
    Vector x, h_prev, c_prev;
    Vector f, i, o, ctil;
    Vector c;
    Vector ahat, atil, a, chat;
    Vector tanh_c;
    // GRU slots (z reuses i, r reuses f would be confusing; kept separate).
    Vector z, r, htil, rh;
};

struct LstmGrads {
    Matrix W_f, W_i, W_c, W_o;
    Vector b_f, b_i, b_c, b_o;

    LstmGrads() = default;
    explicit LstmGrads(const LstmParams& p);
};

struct LstaGrads {
    LstmGrads lstm;
    Matrix W_ahat, W_atil;
    Vector b_ahat, b_atil;

    LstaGrads() = default;
    explicit LstaGrads(const LstaParams& p);
};

struct GruGrads {
    Matrix W_z, W_r, W_h;
    Vector b_z, b_r, b_h;

    GruGrads() = default;
    explicit GruGrads(const GruParams& p);
};

// Inputs to a single backward step and its results. d_h / d_c are the loss
// gradients flowing into h_t and the carried state.
struct StepBackwardResult {
    Vector d_x, d_h_prev, d_c_prev;
};

void lstm_step_forward(const LstmParams& p, const Vector& x, const CellState& prev,
                       CellState& out, StepCache& cache);

// Attention gate: ahat = sigmoid(W_ahat [f,i] + b_ahat), atil = tanh(W_atil [f,i] + b_atil),
// a = ahat * atil.
void lsta_attention(const LstaParams& p, const Vector& f, const Vector& i, Vector& ahat,
                    Vector& atil, Vector& a);

void lsta_step_forward(const LstaParams& p, const Vector& x, const CellState& prev,
                       CellState& out, StepCache& cache);

void gru_step_forward(const GruParams& p, const Vector& x, const CellState& prev,
                      CellState& out, StepCache& cache);

// Backward passes accumulate into grads (additive across timesteps).
StepBackwardResult lstm_step_backward(const LstmParams& p, const StepCache& cache,
                                      const Vector& d_h, const Vector& d_c, LstmGrads& grads);

StepBackwardResult lsta_step_backward(const LstaParams& p, const StepCache& cache,
                                      const Vector& d_h, const Vector& d_c, LstaGrads& grads);

StepBackwardResult gru_step_backward(const GruParams& p, const StepCache& cache,
                                     const Vector& d_h, const Vector& d_c, GruGrads& grads);

// Glorot matrices, zero biases except b_f = 1. When warm_start_as_lstm is set
// on the LSTA variant, W_atil and b_atil start at zero so the cell begins as an
// exact LSTM.
void init_params(LstmParams& p, Rng& rng);
void init_params(LstaParams& p, Rng& rng, bool warm_start_as_lstm);
void init_params(GruParams& p, Rng& rng);

}  // namespace lsta

#include "lsta/cells.hpp"

#include <cmath>

namespace lsta {

LstmParams::LstmParams(std::size_t H, std::size_t D)
    : hidden(H),
      input(D),
      W_f(H, H + D),
      W_i(H, H + D),
      W_c(H, H + D),
      W_o(H, H + D),
      b_f(H),
      b_i(H),
      b_c(H),
      b_o(H) {}

LstaParams::LstaParams(std::size_t H, std::size_t D)
    : lstm(H, D), W_ahat(H, 2 * H), W_atil(H, 2 * H), b_ahat(H), b_atil(H) {}

GruParams::GruParams(std::size_t H, std::size_t D)
    : hidden(H), input(D), W_z(H, H + D), W_r(H, H + D), W_h(H, H + D), b_z(H), b_r(H), b_h(H) {}

LstmGrads::LstmGrads(const LstmParams& p)
    : W_f(p.W_f.rows, p.W_f.cols),
      W_i(p.W_i.rows, p.W_i.cols),
      W_c(p.W_c.rows, p.W_c.cols),
      W_o(p.W_o.rows, p.W_o.cols),
      b_f(p.b_f.dim()),
      b_i(p.b_i.dim()),
      b_c(p.b_c.dim()),
      b_o(p.b_o.dim()) {}

LstaGrads::LstaGrads(const LstaParams& p)
    : lstm(p.lstm),
      W_ahat(p.W_ahat.rows, p.W_ahat.cols),
      W_atil(p.W_atil.rows, p.W_atil.cols),
      b_ahat(p.b_ahat.dim()),
      b_atil(p.b_atil.dim()) {}

GruGrads::GruGrads(const GruParams& p)
    : W_z(p.W_z.rows, p.W_z.cols),
      W_r(p.W_r.rows, p.W_r.cols),
      W_h(p.W_h.rows, p.W_h.cols),
      b_z(p.b_z.dim()),
      b_r(p.b_r.dim()),
      b_h(p.b_h.dim()) {}

namespace {

Vector gate(const Matrix& W, const Vector& in, const Vector& b, bool squash_tanh) {
    Vector z = matvec(W, in);
    add_in_place(z, b);
    return squash_tanh ? tanh_map(z) : sigmoid_map(z);
}

// d(sigmoid(z)) = s(1-s); caller supplies the activation value.
Vector through_sigmoid(const Vector& d_act, const Vector& act) {
    Vector out(act.dim());
    for (std::size_t k = 0; k < act.dim(); ++k) out[k] = d_act[k] * act[k] * (1.0 - act[k]);
    return out;
}

Vector through_tanh(const Vector& d_act, const Vector& act) {
    Vector out(act.dim());
    for (std::size_t k = 0; k < act.dim(); ++k) out[k] = d_act[k] * (1.0 - act[k] * act[k]);
    return out;
}

}  // namespace

void lstm_step_forward(const LstmParams& p, const Vector& x, const CellState& prev,
                       CellState& out, StepCache& cache) {
    require_dim(x, p.input, "lstm_step_forward x");
    require_dim(prev.h, p.hidden, "lstm_step_forward prev.h");
    require_dim(prev.c, p.hidden, "lstm_step_forward prev.c");

    const Vector hx = concat(prev.h, x);
    cache.x = x;
    cache.h_prev = prev.h;
    cache.c_prev = prev.c;
    cache.f = gate(p.W_f, hx, p.b_f, false);
    cache.i = gate(p.W_i, hx, p.b_i, false);
    cache.ctil = gate(p.W_c, hx, p.b_c, true);
    cache.o = gate(p.W_o, hx, p.b_o, false);
    cache.c = add(hadamard(cache.f, prev.c), hadamard(cache.i, cache.ctil));
    cache.tanh_c = tanh_map(cache.c);
    out.h = hadamard(cache.o, cache.tanh_c);
    out.c = cache.c;
}

void lsta_attention(const LstaParams& p, const Vector& f, const Vector& i, Vector& ahat,
                    Vector& atil, Vector& a) {
    require_dim(f, p.hidden(), "lsta_attention f");
    require_dim(i, p.hidden(), "lsta_attention i");
    const Vector fi = concat(f, i);
    ahat = gate(p.W_ahat, fi, p.b_ahat, false);
    atil = gate(p.W_atil, fi, p.b_atil, true);
    a = hadamard(ahat, atil);
}

void lsta_step_forward(const LstaParams& p, const Vector& x, const CellState& prev,
                       CellState& out, StepCache& cache) {
    lstm_step_forward(p.lstm, x, prev, out, cache);
    lsta_attention(p, cache.f, cache.i, cache.ahat, cache.atil, cache.a);
    cache.chat = add(cache.c, cache.a);
    cache.tanh_c = tanh_map(cache.chat);
    out.h = hadamard(cache.o, cache.tanh_c);
    out.c = cache.chat;
}

void gru_step_forward(const GruParams& p, const Vector& x, const CellState& prev,
                      CellState& out, StepCache& cache) {
    require_dim(x, p.input, "gru_step_forward x");
    require_dim(prev.h, p.hidden, "gru_step_forward prev.h");

    const Vector hx = concat(prev.h, x);
    cache.x = x;
    cache.h_prev = prev.h;
    cache.z = gate(p.W_z, hx, p.b_z, false);
    cache.r = gate(p.W_r, hx, p.b_r, false);
    cache.rh = hadamard(cache.r, prev.h);
    cache.htil = gate(p.W_h, concat(cache.rh, x), p.b_h, true);

    out.h = Vector(p.hidden);
    for (std::size_t k = 0; k < p.hidden; ++k)
        out.h[k] = (1.0 - cache.z[k]) * prev.h[k] + cache.z[k] * cache.htil[k];
    out.c = Vector(p.hidden);
}

StepBackwardResult lstm_step_backward(const LstmParams& p, const StepCache& cache,
                                      const Vector& d_h, const Vector& d_c, LstmGrads& grads) {
    require_dim(d_h, p.hidden, "lstm_step_backward d_h");
    require_dim(d_c, p.hidden, "lstm_step_backward d_c");

    const std::size_t H = p.hidden;

    // h = o * tanh(c)
    Vector d_o(H), d_cell(H);
    for (std::size_t k = 0; k < H; ++k) {
        d_o[k] = d_h[k] * cache.tanh_c[k];
        d_cell[k] = d_c[k] + d_h[k] * cache.o[k] * (1.0 - cache.tanh_c[k] * cache.tanh_c[k]);
    }

    // c = f * c_prev + i * ctil
    Vector d_f(H), d_i(H), d_ctil(H), d_c_prev(H);
    for (std::size_t k = 0; k < H; ++k) {
        d_f[k] = d_cell[k] * cache.c_prev[k];
        d_i[k] = d_cell[k] * cache.ctil[k];
        d_ctil[k] = d_cell[k] * cache.i[k];
        d_c_prev[k] = d_cell[k] * cache.f[k];
    }

    const Vector d_zf = through_sigmoid(d_f, cache.f);
    const Vector d_zi = through_sigmoid(d_i, cache.i);
    const Vector d_zc = through_tanh(d_ctil, cache.ctil);
    const Vector d_zo = through_sigmoid(d_o, cache.o);

    const Vector hx = concat(cache.h_prev, cache.x);
    add_outer_in_place(grads.W_f, d_zf, hx);
    add_outer_in_place(grads.W_i, d_zi, hx);
    add_outer_in_place(grads.W_c, d_zc, hx);
    add_outer_in_place(grads.W_o, d_zo, hx);
    add_in_place(grads.b_f, d_zf);
    add_in_place(grads.b_i, d_zi);
    add_in_place(grads.b_c, d_zc);
    add_in_place(grads.b_o, d_zo);

    Vector d_hx = matvec_transposed(p.W_f, d_zf);
    add_in_place(d_hx, matvec_transposed(p.W_i, d_zi));
    add_in_place(d_hx, matvec_transposed(p.W_c, d_zc));
    add_in_place(d_hx, matvec_transposed(p.W_o, d_zo));

    StepBackwardResult out;
    out.d_h_prev = Vector(H);
    out.d_x = Vector(p.input);
    for (std::size_t k = 0; k < H; ++k) out.d_h_prev[k] = d_hx[k];
    for (std::size_t k = 0; k < p.input; ++k) out.d_x[k] = d_hx[H + k];
    out.d_c_prev = d_c_prev;
    return out;
}

StepBackwardResult lsta_step_backward(const LstaParams& p, const StepCache& cache,
                                      const Vector& d_h, const Vector& d_c, LstaGrads& grads) {
    const std::size_t H = p.hidden();
    require_dim(d_h, H, "lsta_step_backward d_h");
    require_dim(d_c, H, "lsta_step_backward d_c");

    // h = o * tanh(chat), chat = c + a
    Vector d_o(H), d_chat(H);
    for (std::size_t k = 0; k < H; ++k) {
        d_o[k] = d_h[k] * cache.tanh_c[k];
        d_chat[k] = d_c[k] + d_h[k] * cache.o[k] * (1.0 - cache.tanh_c[k] * cache.tanh_c[k]);
    }

    // a = ahat * atil
    Vector d_ahat(H), d_atil(H);
    for (std::size_t k = 0; k < H; ++k) {
        d_ahat[k] = d_chat[k] * cache.atil[k];
        d_atil[k] = d_chat[k] * cache.ahat[k];
    }
    const Vector d_zahat = through_sigmoid(d_ahat, cache.ahat);
    const Vector d_zatil = through_tanh(d_atil, cache.atil);

    const Vector fi = concat(cache.f, cache.i);
    add_outer_in_place(grads.W_ahat, d_zahat, fi);
    add_outer_in_place(grads.W_atil, d_zatil, fi);
    add_in_place(grads.b_ahat, d_zahat);
    add_in_place(grads.b_atil, d_zatil);

    Vector d_fi = matvec_transposed(p.W_ahat, d_zahat);
    add_in_place(d_fi, matvec_transposed(p.W_atil, d_zatil));

    // f and i receive gradient both from chat = f*c_prev + i*ctil + a and from
    // the attention gate input concat(f, i).
    Vector d_f(H), d_i(H), d_ctil(H), d_c_prev(H);
    for (std::size_t k = 0; k < H; ++k) {
        d_f[k] = d_chat[k] * cache.c_prev[k] + d_fi[k];
        d_i[k] = d_chat[k] * cache.ctil[k] + d_fi[H + k];
        d_ctil[k] = d_chat[k] * cache.i[k];
        d_c_prev[k] = d_chat[k] * cache.f[k];
    }

    const Vector d_zf = through_sigmoid(d_f, cache.f);
    const Vector d_zi = through_sigmoid(d_i, cache.i);
    const Vector d_zc = through_tanh(d_ctil, cache.ctil);
    const Vector d_zo = through_sigmoid(d_o, cache.o);

    const Vector hx = concat(cache.h_prev, cache.x);
    LstmGrads& lg = grads.lstm;
    add_outer_in_place(lg.W_f, d_zf, hx);
    add_outer_in_place(lg.W_i, d_zi, hx);
    add_outer_in_place(lg.W_c, d_zc, hx);
    add_outer_in_place(lg.W_o, d_zo, hx);
    add_in_place(lg.b_f, d_zf);
    add_in_place(lg.b_i, d_zi);
    add_in_place(lg.b_c, d_zc);
    add_in_place(lg.b_o, d_zo);

    Vector d_hx = matvec_transposed(p.lstm.W_f, d_zf);
    add_in_place(d_hx, matvec_transposed(p.lstm.W_i, d_zi));
    add_in_place(d_hx, matvec_transposed(p.lstm.W_c, d_zc));
    add_in_place(d_hx, matvec_transposed(p.lstm.W_o, d_zo));

    StepBackwardResult out;
    out.d_h_prev = Vector(H);
    out.d_x = Vector(p.input());
    for (std::size_t k = 0; k < H; ++k) out.d_h_prev[k] = d_hx[k];
    for (std::size_t k = 0; k < p.input(); ++k) out.d_x[k] = d_hx[H + k];
    out.d_c_prev = d_c_prev;
    return out;
}

StepBackwardResult gru_step_backward(const GruParams& p, const StepCache& cache,
                                     const Vector& d_h, const Vector& /*d_c*/, GruGrads& grads) {
    const std::size_t H = p.hidden;
    require_dim(d_h, H, "gru_step_backward d_h");

    // h = (1-z) * h_prev + z * htil
    Vector d_z(H), d_htil(H), d_h_prev(H);
    for (std::size_t k = 0; k < H; ++k) {
        d_z[k] = d_h[k] * (cache.htil[k] - cache.h_prev[k]);
        d_htil[k] = d_h[k] * cache.z[k];
        d_h_prev[k] = d_h[k] * (1.0 - cache.z[k]);
    }

    const Vector d_zh = through_tanh(d_htil, cache.htil);
    const Vector rhx = concat(cache.rh, cache.x);
    add_outer_in_place(grads.W_h, d_zh, rhx);
    add_in_place(grads.b_h, d_zh);

    const Vector d_rhx = matvec_transposed(p.W_h, d_zh);
    Vector d_r(H);
    StepBackwardResult out;
    out.d_x = Vector(p.input);
    for (std::size_t k = 0; k < H; ++k) {
        d_r[k] = d_rhx[k] * cache.h_prev[k];
        d_h_prev[k] += d_rhx[k] * cache.r[k];
    }
    for (std::size_t k = 0; k < p.input; ++k) out.d_x[k] = d_rhx[H + k];

    const Vector d_zz = through_sigmoid(d_z, cache.z);
    const Vector d_zr = through_sigmoid(d_r, cache.r);

    const Vector hx = concat(cache.h_prev, cache.x);
    add_outer_in_place(grads.W_z, d_zz, hx);
    add_outer_in_place(grads.W_r, d_zr, hx);
    add_in_place(grads.b_z, d_zz);
    add_in_place(grads.b_r, d_zr);

    Vector d_hx = matvec_transposed(p.W_z, d_zz);
    add_in_place(d_hx, matvec_transposed(p.W_r, d_zr));
    for (std::size_t k = 0; k < H; ++k) d_h_prev[k] += d_hx[k];
    for (std::size_t k = 0; k < p.input; ++k) out.d_x[k] += d_hx[H + k];

    out.d_h_prev = d_h_prev;
    out.d_c_prev = Vector(H);
    return out;
}

void init_params(LstmParams& p, Rng& rng) {
    p.W_f = glorot_init(rng, p.W_f.rows, p.W_f.cols);
    p.W_i = glorot_init(rng, p.W_i.rows, p.W_i.cols);
    p.W_c = glorot_init(rng, p.W_c.rows, p.W_c.cols);
    p.W_o = glorot_init(rng, p.W_o.rows, p.W_o.cols);
    for (double& v : p.b_f.values) v = 1.0;  // forget-bias 1
}

void init_params(LstaParams& p, Rng& rng, bool warm_start_as_lstm) {
    init_params(p.lstm, rng);
    p.W_ahat = glorot_init(rng, p.W_ahat.rows, p.W_ahat.cols);
    if (warm_start_as_lstm) {
        p.W_atil = Matrix(p.W_atil.rows, p.W_atil.cols);
        p.b_atil = Vector(p.b_atil.dim());
    } else {
        p.W_atil = glorot_init(rng, p.W_atil.rows, p.W_atil.cols);
    }
}

void init_params(GruParams& p, Rng& rng) {
    p.W_z = glorot_init(rng, p.W_z.rows, p.W_z.cols);
    p.W_r = glorot_init(rng, p.W_r.rows, p.W_r.cols);
    p.W_h = glorot_init(rng, p.W_h.rows, p.W_h.cols);
}

}  // namespace lsta

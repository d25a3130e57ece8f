#include "lsta/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lsta {

const char* to_string(CellKind k) {
    switch (k) {
        case CellKind::lstm: return "lstm";
        case CellKind::lsta: return "lsta";
        case CellKind::gru: return "gru";
    }
    return "?";
}

const char* to_string(Direction d) {
    return d == Direction::forward ? "forward" : "bidirectional";
}

namespace {

Vector row_of(const Matrix& m, std::size_t r) {
    Vector out(m.cols);
    for (std::size_t c = 0; c < m.cols; ++c) out[c] = m(r, c);
    return out;
}

CellParamsVariant make_cell(CellKind kind, std::size_t H, std::size_t D, Rng& rng,
                            bool warm_start_as_lstm) {
    switch (kind) {
        case CellKind::lstm: {
            LstmParams p(H, D);
            init_params(p, rng);
            return p;
        }
        case CellKind::lsta: {
            LstaParams p(H, D);
            init_params(p, rng, warm_start_as_lstm);
            return p;
        }
        case CellKind::gru: {
            GruParams p(H, D);
            init_params(p, rng);
            return p;
        }
    }
    throw std::logic_error("unknown cell kind");
}

void step_forward(const CellParamsVariant& cell, const Vector& x, const CellState& prev,
                  CellState& out, StepCache& cache) {
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LstmParams>) {
                lstm_step_forward(p, x, prev, out, cache);
            } else if constexpr (std::is_same_v<P, LstaParams>) {
                lsta_step_forward(p, x, prev, out, cache);
            } else {
                gru_step_forward(p, x, prev, out, cache);
            }
        },
        cell);
}

StepBackwardResult step_backward(const CellParamsVariant& cell, const StepCache& cache,
                                 const Vector& d_h, const Vector& d_c, CellGradsVariant& grads) {
    return std::visit(
        [&](const auto& p) -> StepBackwardResult {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LstmParams>) {
                return lstm_step_backward(p, cache, d_h, d_c, std::get<LstmGrads>(grads));
            } else if constexpr (std::is_same_v<P, LstaParams>) {
                return lsta_step_backward(p, cache, d_h, d_c, std::get<LstaGrads>(grads));
            } else {
                return gru_step_backward(p, cache, d_h, d_c, std::get<GruGrads>(grads));
            }
        },
        cell);
}

template <class T>
void collect_lstm_blocks(T& p, const std::string& pre, std::vector<ParamBlock>& out) {
    out.push_back({pre + "W_f", p.W_f.values.data(), p.W_f.size()});
    out.push_back({pre + "W_i", p.W_i.values.data(), p.W_i.size()});
    out.push_back({pre + "W_c", p.W_c.values.data(), p.W_c.size()});
    out.push_back({pre + "W_o", p.W_o.values.data(), p.W_o.size()});
    out.push_back({pre + "b_f", p.b_f.values.data(), p.b_f.dim()});
    out.push_back({pre + "b_i", p.b_i.values.data(), p.b_i.dim()});
    out.push_back({pre + "b_c", p.b_c.values.data(), p.b_c.dim()});
    out.push_back({pre + "b_o", p.b_o.values.data(), p.b_o.dim()});
}

template <class T>
void collect_lsta_blocks(T& p, const std::string& pre, std::vector<ParamBlock>& out) {
    collect_lstm_blocks(p.lstm, pre, out);
    out.push_back({pre + "W_ahat", p.W_ahat.values.data(), p.W_ahat.size()});
    out.push_back({pre + "W_atil", p.W_atil.values.data(), p.W_atil.size()});
    out.push_back({pre + "b_ahat", p.b_ahat.values.data(), p.b_ahat.dim()});
    out.push_back({pre + "b_atil", p.b_atil.values.data(), p.b_atil.dim()});
}

template <class T>
void collect_gru_blocks(T& p, const std::string& pre, std::vector<ParamBlock>& out) {
    out.push_back({pre + "W_z", p.W_z.values.data(), p.W_z.size()});
    out.push_back({pre + "W_r", p.W_r.values.data(), p.W_r.size()});
    out.push_back({pre + "W_h", p.W_h.values.data(), p.W_h.size()});
    out.push_back({pre + "b_z", p.b_z.values.data(), p.b_z.dim()});
    out.push_back({pre + "b_r", p.b_r.values.data(), p.b_r.dim()});
    out.push_back({pre + "b_h", p.b_h.values.data(), p.b_h.dim()});
}

template <class CellVariant, class Head>
std::vector<ParamBlock> collect_blocks(std::vector<CellVariant>& cells, Head& head_W,
                                       Vector& head_b) {
    std::vector<ParamBlock> out;
    for (std::size_t d = 0; d < cells.size(); ++d) {
        const std::string pre = (cells.size() == 1) ? "" : (d == 0 ? "fwd." : "bwd.");
        std::visit(
            [&](auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, LstmParams> || std::is_same_v<P, LstmGrads>) {
                    collect_lstm_blocks(p, pre, out);
                } else if constexpr (std::is_same_v<P, LstaParams> ||
                                     std::is_same_v<P, LstaGrads>) {
                    collect_lsta_blocks(p, pre, out);
                } else {
                    collect_gru_blocks(p, pre, out);
                }
            },
            cells[d]);
    }
    out.push_back({"head_W", head_W.values.data(), head_W.size()});
    out.push_back({"head_b", head_b.values.data(), head_b.dim()});
    return out;
}

}  // namespace

SequenceModel make_model(CellKind kind, Direction direction, std::size_t hidden,
                         std::size_t input, std::size_t classes, Rng& rng,
                         bool warm_start_as_lstm) {
    SequenceModel m;
    m.kind = kind;
    m.direction = direction;
    m.hidden = hidden;
    m.input = input;
    m.classes = classes;
    const std::size_t dirs = direction == Direction::bidirectional ? 2 : 1;
    for (std::size_t d = 0; d < dirs; ++d)
        m.cells.push_back(make_cell(kind, hidden, input, rng, warm_start_as_lstm));
    m.head_W = glorot_init(rng, classes, dirs * hidden);
    m.head_b = Vector(classes);
    return m;
}

ModelGrads zero_grads(const SequenceModel& model) {
    ModelGrads g;
    for (const auto& cell : model.cells) {
        std::visit(
            [&](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, LstmParams>) {
                    g.cells.emplace_back(LstmGrads(p));
                } else if constexpr (std::is_same_v<P, LstaParams>) {
                    g.cells.emplace_back(LstaGrads(p));
                } else {
                    g.cells.emplace_back(GruGrads(p));
                }
            },
            cell);
    }
    g.head_W = Matrix(model.head_W.rows, model.head_W.cols);
    g.head_b = Vector(model.head_b.dim());
    return g;
}

std::vector<ParamBlock> param_blocks(SequenceModel& model) {
    return collect_blocks(model.cells, model.head_W, model.head_b);
}

std::vector<ParamBlock> param_blocks(ModelGrads& grads) {
    return collect_blocks(grads.cells, grads.head_W, grads.head_b);
}

ForwardTrace unroll_forward(const SequenceModel& model, const Matrix& sequence) {
    if (sequence.rows == 0) throw ShapeError("unroll_forward: empty sequence");
    if (sequence.cols != model.input)
        throw ShapeError("unroll_forward: sequence feature dim " + std::to_string(sequence.cols) +
                         " vs model input " + std::to_string(model.input));

    const std::size_t T = sequence.rows;
    ForwardTrace trace;
    trace.caches.resize(model.cells.size());

    Vector feature;
    for (std::size_t d = 0; d < model.cells.size(); ++d) {
        trace.caches[d].resize(T);
        CellState state(model.hidden);
        CellState next(model.hidden);
        for (std::size_t step = 0; step < T; ++step) {
            // Direction 1 walks the sequence right-to-left.
            const std::size_t t = (d == 0) ? step : T - 1 - step;
            step_forward(model.cells[d], row_of(sequence, t), state, next, trace.caches[d][step]);
            std::swap(state, next);
        }
        feature = (d == 0) ? state.h : concat(feature, state.h);
    }

    trace.feature = feature;
    trace.logits = add(matvec(model.head_W, feature), model.head_b);

    // Stable softmax.
    double mx = trace.logits[0];
    for (double v : trace.logits.values) mx = std::max(mx, v);
    double denom = 0.0;
    trace.probabilities = Vector(model.classes);
    for (std::size_t k = 0; k < model.classes; ++k) {
        trace.probabilities[k] = std::exp(trace.logits[k] - mx);
        denom += trace.probabilities[k];
    }
    for (std::size_t k = 0; k < model.classes; ++k) trace.probabilities[k] /= denom;
    return trace;
}

LossResult softmax_cross_entropy(const Vector& logits, std::size_t target) {
    const std::size_t K = logits.dim();
    if (target >= K)
        throw std::out_of_range("softmax_cross_entropy: target " + std::to_string(target) +
                                " out of range for K=" + std::to_string(K));
    double mx = logits[0];
    for (double v : logits.values) mx = std::max(mx, v);
    double denom = 0.0;
    for (double v : logits.values) denom += std::exp(v - mx);
    const double log_z = mx + std::log(denom);

    LossResult out;
    out.loss = log_z - logits[target];
    out.d_logits = Vector(K);
    for (std::size_t k = 0; k < K; ++k) {
        out.d_logits[k] = std::exp(logits[k] - log_z) - (k == target ? 1.0 : 0.0);
    }
    return out;
}

ModelGrads bptt_backward(const SequenceModel& model, const Matrix& sequence,
                         const ForwardTrace& trace, std::size_t target) {
    if (trace.caches.size() != model.cells.size() || trace.caches[0].size() != sequence.rows)
        throw ShapeError("bptt_backward: trace does not match model/sequence");

    ModelGrads grads = zero_grads(model);
    const LossResult loss = softmax_cross_entropy(trace.logits, target);

    add_outer_in_place(grads.head_W, loss.d_logits, trace.feature);
    add_in_place(grads.head_b, loss.d_logits);
    const Vector d_feature = matvec_transposed(model.head_W, loss.d_logits);

    const std::size_t T = sequence.rows;
    const std::size_t H = model.hidden;
    for (std::size_t d = 0; d < model.cells.size(); ++d) {
        Vector d_h(H), d_c(H);
        for (std::size_t k = 0; k < H; ++k) d_h[k] = d_feature[d * H + k];
        for (std::size_t step = T; step-- > 0;) {
            const StepBackwardResult r =
                step_backward(model.cells[d], trace.caches[d][step], d_h, d_c, grads.cells[d]);
            d_h = r.d_h_prev;
            d_c = r.d_c_prev;
        }
    }
    return grads;
}

GradCheckReport grad_check(const SequenceModel& model, const Matrix& sequence,
                           std::size_t target, double step, double threshold) {
    SequenceModel work = model;
    const ForwardTrace trace = unroll_forward(work, sequence);
    ModelGrads analytic = bptt_backward(work, sequence, trace, target);

    auto loss_at = [&]() {
        const ForwardTrace t = unroll_forward(work, sequence);
        return softmax_cross_entropy(t.logits, target).loss;
    };

    std::vector<ParamBlock> pblocks = param_blocks(work);
    std::vector<ParamBlock> gblocks = param_blocks(analytic);

    GradCheckReport report;
    report.threshold = threshold;
    for (std::size_t b = 0; b < pblocks.size(); ++b) {
        GradCheckBlock blk;
        blk.name = pblocks[b].name;
        for (std::size_t j = 0; j < pblocks[b].size; ++j) {
            double& param = pblocks[b].data[j];
            const double saved = param;
            param = saved + step;
            const double lp = loss_at();
            param = saved - step;
            const double lm = loss_at();
            param = saved;
            const double numeric = (lp - lm) / (2.0 * step);
            const double analytic_g = gblocks[b].data[j];
            const double denom =
                std::max({std::abs(analytic_g), std::abs(numeric), 1e-8});
            blk.max_rel_err = std::max(blk.max_rel_err, std::abs(analytic_g - numeric) / denom);
        }
        report.global_max = std::max(report.global_max, blk.max_rel_err);
        report.blocks.push_back(std::move(blk));
    }
    report.pass = report.global_max < threshold;
    return report;
}

std::size_t predict(const SequenceModel& model, const Matrix& sequence) {
    const ForwardTrace trace = unroll_forward(model, sequence);
    std::size_t best = 0;
    for (std::size_t k = 1; k < trace.probabilities.dim(); ++k) {
        if (trace.probabilities[k] > trace.probabilities[best]) best = k;
    }
    return best;
}

}  // namespace lsta

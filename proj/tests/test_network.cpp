#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lsta/network.hpp"

using namespace lsta;

namespace {

Matrix random_seq(Rng& rng, std::size_t T, std::size_t D) {
    Matrix m(T, D);
    for (double& v : m.values) v = rng.uniform(-1.0, 1.0);
    return m;
}

void zero_all(SequenceModel& m) {
    for (ParamBlock& b : param_blocks(m))
        for (std::size_t j = 0; j < b.size; ++j) b.data[j] = 0.0;
}

}  // namespace

TEST_CASE("unroll_forward: zero params give uniform probabilities") {
    Rng rng(41);
    SequenceModel m = make_model(CellKind::lstm, Direction::forward, 3, 2, 4, rng);
    zero_all(m);
    Matrix seq(1, 2);
    ForwardTrace t = unroll_forward(m, seq);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(t.probabilities[k] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("unroll_forward rejects bad input") {
    Rng rng(42);
    SequenceModel m = make_model(CellKind::lstm, Direction::forward, 3, 2, 4, rng);
    CHECK_THROWS_AS(unroll_forward(m, Matrix(0, 2)), ShapeError);
    CHECK_THROWS_AS(unroll_forward(m, Matrix(4, 3)), ShapeError);
}

TEST_CASE("bidirectional palindrome symmetry with shared per-direction params") {
    Rng rng(43);
    SequenceModel m = make_model(CellKind::lstm, Direction::bidirectional, 3, 2, 2, rng);
    m.cells[1] = m.cells[0];
    // Palindrome: rows mirror around the middle.
    Matrix seq(5, 2);
    Rng r2(44);
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t d = 0; d < 2; ++d) {
            seq(t, d) = r2.uniform(-1.0, 1.0);
            seq(4 - t, d) = seq(t, d);
        }
    ForwardTrace trace = unroll_forward(m, seq);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::abs(trace.feature[k] - trace.feature[3 + k]) < 1e-12);
}

TEST_CASE("unroll_forward equals manual step composition") {
    Rng rng(45);
    SequenceModel m = make_model(CellKind::lstm, Direction::forward, 3, 2, 2, rng);
    Matrix seq = random_seq(rng, 4, 2);

    const LstmParams& p = std::get<LstmParams>(m.cells[0]);
    CellState state(3), next(3);
    for (std::size_t t = 0; t < 4; ++t) {
        Vector x(2);
        for (std::size_t c = 0; c < 2; ++c) x[c] = seq(t, c);
        StepCache cache;
        lstm_step_forward(p, x, state, next, cache);
        std::swap(state, next);
    }
    Vector logits = add(matvec(m.head_W, state.h), m.head_b);

    ForwardTrace trace = unroll_forward(m, seq);
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(trace.logits[k] == doctest::Approx(logits[k]).epsilon(1e-14));
    double sum = 0.0;
    for (double v : trace.probabilities.values) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("softmax cross entropy") {
    SUBCASE("uniform logits, K=10") {
        Vector logits(10);
        LossResult r = softmax_cross_entropy(logits, 3);
        CHECK(r.loss == doctest::Approx(std::log(10.0)).epsilon(1e-12));
    }
    SUBCASE("huge logit gap stays finite") {
        LossResult r = softmax_cross_entropy(Vector{1000.0, 0.0}, 0);
        CHECK(r.loss >= 0.0);
        CHECK(r.loss < 1e-9);
        CHECK(std::isfinite(r.d_logits[0]));
    }
    SUBCASE("d_logits matches finite differences") {
        Rng rng(46);
        Vector logits(5);
        for (double& v : logits.values) v = rng.uniform(-3.0, 3.0);
        LossResult r = softmax_cross_entropy(logits, 2);
        const double step = 1e-6;
        for (std::size_t k = 0; k < 5; ++k) {
            Vector lp = logits, lm = logits;
            lp[k] += step;
            lm[k] -= step;
            const double numeric = (softmax_cross_entropy(lp, 2).loss -
                                    softmax_cross_entropy(lm, 2).loss) /
                                   (2.0 * step);
            CHECK(std::abs(numeric - r.d_logits[k]) < 1e-6);
        }
    }
    SUBCASE("target out of range") {
        CHECK_THROWS_AS(softmax_cross_entropy(Vector{0.0, 1.0}, 2), std::out_of_range);
    }
    SUBCASE("loss is non-negative") {
        Rng rng(47);
        for (int rep = 0; rep < 50; ++rep) {
            Vector logits(4);
            for (double& v : logits.values) v = rng.uniform(-5.0, 5.0);
            CHECK(softmax_cross_entropy(logits, rep % 4).loss >= 0.0);
        }
    }
}

TEST_CASE("bptt: zero params put all gradient in the head bias") {
    Rng rng(48);
    SequenceModel m = make_model(CellKind::lstm, Direction::forward, 3, 2, 4, rng);
    zero_all(m);
    Matrix seq(3, 2);
    ForwardTrace trace = unroll_forward(m, seq);
    ModelGrads g = bptt_backward(m, seq, trace, 1);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(g.head_b[k] ==
              doctest::Approx(trace.probabilities[k] - (k == 1 ? 1.0 : 0.0)).epsilon(1e-12));
    const LstmGrads& lg = std::get<LstmGrads>(g.cells[0]);
    for (double v : lg.W_f.values) CHECK(v == 0.0);
    for (double v : lg.b_c.values) CHECK(v == 0.0);
}

TEST_CASE("model-level gradients match finite differences") {
    for (const CellKind kind : {CellKind::lstm, CellKind::lsta, CellKind::gru}) {
        for (const Direction dir : {Direction::forward, Direction::bidirectional}) {
            CAPTURE(to_string(kind));
            CAPTURE(to_string(dir));
            Rng rng(49 + static_cast<int>(kind) * 2 + static_cast<int>(dir));
            SequenceModel m = make_model(kind, dir, 4, 3, 3, rng);
            Matrix seq = random_seq(rng, 5, 3);
            GradCheckReport report = grad_check(m, seq, 1, 1e-6, 1e-4);
            CHECK(report.pass);
            CHECK(report.global_max < 1e-4);
        }
    }
}

TEST_CASE("grad_check report covers every block and flags a corrupted gradient") {
    Rng rng(50);
    SequenceModel m = make_model(CellKind::lstm, Direction::forward, 4, 3, 2, rng);
    Matrix seq = random_seq(rng, 4, 3);
    GradCheckReport good = grad_check(m, seq, 0, 1e-6, 1e-4);
    REQUIRE(good.pass);

    std::vector<std::string> names;
    for (const GradCheckBlock& b : good.blocks) names.push_back(b.name);
    std::sort(names.begin(), names.end());
    CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
    CHECK(names.size() == 10);  // 8 cell blocks + head_W + head_b

    // Corrupt one analytic entry (x2) and redo the head_b comparison by hand:
    // the offending block must blow past the threshold.
    ForwardTrace trace = unroll_forward(m, seq);
    ModelGrads g = bptt_backward(m, seq, trace, 0);
    const double analytic = 2.0 * g.head_b[0];
    const double step = 1e-6;
    const double saved = m.head_b[0];
    m.head_b[0] = saved + step;
    const double lp = softmax_cross_entropy(unroll_forward(m, seq).logits, 0).loss;
    m.head_b[0] = saved - step;
    const double lm = softmax_cross_entropy(unroll_forward(m, seq).logits, 0).loss;
    m.head_b[0] = saved;
    const double numeric = (lp - lm) / (2.0 * step);
    const double rel =
        std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    CHECK(rel > 1e-4);
}

TEST_CASE("whole-model lstm reduction") {
    Rng rng(51);
    SequenceModel lsta_m = make_model(CellKind::lsta, Direction::forward, 8, 5, 3, rng, true);
    SequenceModel lstm_m;
    lstm_m.kind = CellKind::lstm;
    lstm_m.direction = Direction::forward;
    lstm_m.hidden = 8;
    lstm_m.input = 5;
    lstm_m.classes = 3;
    lstm_m.cells.push_back(std::get<LstaParams>(lsta_m.cells[0]).lstm);
    lstm_m.head_W = lsta_m.head_W;
    lstm_m.head_b = lsta_m.head_b;

    Rng data_rng(52);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix seq = random_seq(data_rng, 10, 5);
        ForwardTrace ta = unroll_forward(lsta_m, seq);
        ForwardTrace tb = unroll_forward(lstm_m, seq);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(std::abs(ta.logits[k] - tb.logits[k]) < 1e-12);
        const std::size_t target = rep % 3;
        CHECK(std::abs(softmax_cross_entropy(ta.logits, target).loss -
                       softmax_cross_entropy(tb.logits, target).loss) < 1e-12);
        CHECK(predict(lsta_m, seq) == predict(lstm_m, seq));
    }
}

TEST_CASE("predict") {
    Rng rng(53);
    SequenceModel m = make_model(CellKind::lstm, Direction::forward, 3, 2, 3, rng);
    zero_all(m);
    Matrix seq(2, 2);
    // Uniform probabilities: tie broken toward class 0.
    CHECK(predict(m, seq) == 0);

    m.head_b = Vector{0.1, 5.0, -2.0};
    CHECK(predict(m, seq) == 1);

    // Argmax invariance under constant logit shifts.
    SequenceModel shifted = m;
    for (double& v : shifted.head_b.values) v += 100.0;
    Rng r2(54);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix s = random_seq(r2, 3, 2);
        CHECK(predict(m, s) == predict(shifted, s));
    }
}

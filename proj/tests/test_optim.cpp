#include <doctest.h>

#include <cmath>

#include "lsta/optim.hpp"

using namespace lsta;

namespace {

SequenceModel tiny_model(std::uint64_t seed = 60) {
    Rng rng(seed);
    return make_model(CellKind::lstm, Direction::forward, 2, 2, 2, rng);
}

void fill_grads(ModelGrads& g, double value) {
    for (ParamBlock& b : param_blocks(g))
        for (std::size_t j = 0; j < b.size; ++j) b.data[j] = value;
}

std::size_t total_scalars(ModelGrads& g) {
    std::size_t n = 0;
    for (const ParamBlock& b : param_blocks(g)) n += b.size;
    return n;
}

}  // namespace

TEST_CASE("clip_global_norm") {
    SequenceModel m = tiny_model();
    ModelGrads g = zero_grads(m);
    const std::size_t n = total_scalars(g);

    SUBCASE("norm above the cap halves every entry") {
        const double v = 10.0 / std::sqrt(static_cast<double>(n));  // norm 10
        fill_grads(g, v);
        const double scale = clip_global_norm(g, 5.0);
        CHECK(scale == doctest::Approx(0.5).epsilon(1e-12));
        for (ParamBlock& b : param_blocks(g))
            for (std::size_t j = 0; j < b.size; ++j)
                CHECK(b.data[j] == doctest::Approx(v * 0.5).epsilon(1e-12));
    }
    SUBCASE("norm under the cap is untouched") {
        const double v = 3.0 / std::sqrt(static_cast<double>(n));
        fill_grads(g, v);
        CHECK(clip_global_norm(g, 5.0) == 1.0);
        CHECK(param_blocks(g)[0].data[0] == v);
    }
    SUBCASE("post-clip norm is min(norm, cap)") {
        Rng rng(61);
        for (int rep = 0; rep < 10; ++rep) {
            for (ParamBlock& b : param_blocks(g))
                for (std::size_t j = 0; j < b.size; ++j) b.data[j] = rng.uniform(-1.0, 1.0);
            double before = 0.0;
            for (ParamBlock& b : param_blocks(g))
                for (std::size_t j = 0; j < b.size; ++j) before += b.data[j] * b.data[j];
            before = std::sqrt(before);
            const double cap = rep % 2 == 0 ? before * 0.3 : before * 3.0;
            clip_global_norm(g, cap);
            double after = 0.0;
            for (ParamBlock& b : param_blocks(g))
                for (std::size_t j = 0; j < b.size; ++j) after += b.data[j] * b.data[j];
            after = std::sqrt(after);
            CHECK(after == doctest::Approx(std::min(before, cap)).epsilon(1e-9));
        }
    }
    SUBCASE("never increases any magnitude") {
        Rng rng(62);
        for (ParamBlock& b : param_blocks(g))
            for (std::size_t j = 0; j < b.size; ++j) b.data[j] = rng.uniform(-2.0, 2.0);
        ModelGrads before = g;
        clip_global_norm(g, 0.5);
        auto bb = param_blocks(before);
        auto ba = param_blocks(g);
        for (std::size_t b = 0; b < bb.size(); ++b)
            for (std::size_t j = 0; j < bb[b].size; ++j)
                CHECK(std::abs(ba[b].data[j]) <= std::abs(bb[b].data[j]) + 1e-15);
    }
}

TEST_CASE("sgd update") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::sgd;
    cfg.learning_rate = 0.1;
    cfg.momentum = 0.0;
    cfg.clip_norm = 0.0;

    SUBCASE("plain step decreases by lr*g") {
        SequenceModel m = tiny_model();
        SequenceModel before = m;
        OptimizerState st = make_optimizer_state(cfg, m);
        ModelGrads g = zero_grads(m);
        fill_grads(g, 1.0);
        sgd_update(m, g, st, cfg);
        auto pb = param_blocks(before);
        auto pa = param_blocks(m);
        for (std::size_t b = 0; b < pb.size(); ++b)
            for (std::size_t j = 0; j < pb[b].size; ++j)
                CHECK(pa[b].data[j] == doctest::Approx(pb[b].data[j] - 0.1).epsilon(1e-12));
    }
    SUBCASE("zero gradient leaves params, decays velocity") {
        cfg.momentum = 0.9;
        SequenceModel m = tiny_model();
        OptimizerState st = make_optimizer_state(cfg, m);
        st.m[0][0] = 1.0;
        SequenceModel before = m;
        ModelGrads g = zero_grads(m);
        sgd_update(m, g, st, cfg);
        CHECK(st.m[0][0] == doctest::Approx(0.9).epsilon(1e-12));
        // Velocity 0.9 still moves that one param; the rest stay put.
        auto pb = param_blocks(before);
        auto pa = param_blocks(m);
        CHECK(pa[0].data[0] == doctest::Approx(pb[0].data[0] - 0.1 * 0.9).epsilon(1e-12));
        CHECK(pa[1].data[0] == pb[1].data[0]);
    }
    SUBCASE("two momentum steps match the hand recurrence") {
        cfg.momentum = 0.9;
        SequenceModel m = tiny_model();
        SequenceModel before = m;
        OptimizerState st = make_optimizer_state(cfg, m);
        ModelGrads g = zero_grads(m);
        fill_grads(g, 2.0);
        sgd_update(m, g, st, cfg);
        fill_grads(g, 2.0);
        sgd_update(m, g, st, cfg);
        // v1 = g, v2 = 0.9 g + g => total = lr*(1 + 1.9)*g
        auto pb = param_blocks(before);
        auto pa = param_blocks(m);
        for (std::size_t b = 0; b < pb.size(); ++b)
            for (std::size_t j = 0; j < pb[b].size; ++j)
                CHECK(pa[b].data[j] ==
                      doctest::Approx(pb[b].data[j] - 0.1 * 2.9 * 2.0).epsilon(1e-12));
    }
}

TEST_CASE("adam update") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::adam;
    cfg.learning_rate = 1e-3;
    cfg.clip_norm = 0.0;

    SUBCASE("first step approximates -lr*sign(g)") {
        SequenceModel m = tiny_model();
        SequenceModel before = m;
        OptimizerState st = make_optimizer_state(cfg, m);
        ModelGrads g = zero_grads(m);
        Rng rng(63);
        for (ParamBlock& b : param_blocks(g))
            for (std::size_t j = 0; j < b.size; ++j)
                b.data[j] = rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        ModelGrads gcopy = g;
        adam_update(m, g, st, cfg);
        auto pb = param_blocks(before);
        auto pa = param_blocks(m);
        auto gb = param_blocks(gcopy);
        for (std::size_t b = 0; b < pb.size(); ++b)
            for (std::size_t j = 0; j < pb[b].size; ++j) {
                const double delta = pa[b].data[j] - pb[b].data[j];
                const double expected = -cfg.learning_rate * (gb[b].data[j] > 0 ? 1.0 : -1.0);
                CHECK(std::abs(delta - expected) < cfg.learning_rate * 1e-6);
            }
    }
    SUBCASE("zero gradients never move params") {
        SequenceModel m = tiny_model();
        SequenceModel before = m;
        OptimizerState st = make_optimizer_state(cfg, m);
        for (int step = 0; step < 5; ++step) {
            ModelGrads g = zero_grads(m);
            adam_update(m, g, st, cfg);
        }
        auto pb = param_blocks(before);
        auto pa = param_blocks(m);
        for (std::size_t b = 0; b < pb.size(); ++b)
            for (std::size_t j = 0; j < pb[b].size; ++j)
                CHECK(pa[b].data[j] == pb[b].data[j]);
    }
    SUBCASE("three constant-gradient steps match the hand recurrence") {
        SequenceModel m = tiny_model();
        SequenceModel before = m;
        OptimizerState st = make_optimizer_state(cfg, m);
        const double gval = 0.37;
        for (int step = 0; step < 3; ++step) {
            ModelGrads g = zero_grads(m);
            fill_grads(g, gval);
            adam_update(m, g, st, cfg);
        }
        // Hand-unrolled scalar recurrence.
        double mm = 0.0, vv = 0.0, x = 0.0;
        for (int t = 1; t <= 3; ++t) {
            mm = cfg.beta1 * mm + (1 - cfg.beta1) * gval;
            vv = cfg.beta2 * vv + (1 - cfg.beta2) * gval * gval;
            const double mhat = mm / (1 - std::pow(cfg.beta1, t));
            const double vhat = vv / (1 - std::pow(cfg.beta2, t));
            x -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
        auto pb = param_blocks(before);
        auto pa = param_blocks(m);
        for (std::size_t b = 0; b < pb.size(); ++b)
            for (std::size_t j = 0; j < pb[b].size; ++j)
                CHECK(pa[b].data[j] == doctest::Approx(pb[b].data[j] + x).epsilon(1e-12));
    }
    SUBCASE("per-step magnitude stays within the lr bound") {
        SequenceModel m = tiny_model();
        OptimizerState st = make_optimizer_state(cfg, m);
        Rng rng(64);
        const double bound = 2.0 * cfg.learning_rate / (1.0 - cfg.beta1);
        for (int step = 0; step < 20; ++step) {
            SequenceModel before = m;
            ModelGrads g = zero_grads(m);
            for (ParamBlock& b : param_blocks(g))
                for (std::size_t j = 0; j < b.size; ++j) b.data[j] = rng.uniform(-3.0, 3.0);
            adam_update(m, g, st, cfg);
            auto pb = param_blocks(before);
            auto pa = param_blocks(m);
            for (std::size_t b = 0; b < pb.size(); ++b)
                for (std::size_t j = 0; j < pb[b].size; ++j)
                    CHECK(std::abs(pa[b].data[j] - pb[b].data[j]) <= bound);
        }
    }
}

TEST_CASE("updates are deterministic") {
    OptimizerConfig cfg;
    SequenceModel m1 = tiny_model(99), m2 = tiny_model(99);
    OptimizerState s1 = make_optimizer_state(cfg, m1);
    OptimizerState s2 = make_optimizer_state(cfg, m2);
    Rng rng(65);
    ModelGrads g1 = zero_grads(m1);
    for (ParamBlock& b : param_blocks(g1))
        for (std::size_t j = 0; j < b.size; ++j) b.data[j] = rng.uniform(-1.0, 1.0);
    ModelGrads g2 = g1;
    apply_update(m1, g1, s1, cfg);
    apply_update(m2, g2, s2, cfg);
    auto p1 = param_blocks(m1);
    auto p2 = param_blocks(m2);
    for (std::size_t b = 0; b < p1.size(); ++b)
        for (std::size_t j = 0; j < p1[b].size; ++j)
            CHECK(p1[b].data[j] == p2[b].data[j]);
}

#include <doctest.h>

#include <cmath>

#include "lsta/linalg.hpp"

using namespace lsta;

namespace {

Vector random_vec(Rng& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
    Vector v(n);
    for (double& x : v.values) x = rng.uniform(lo, hi);
    return v;
}

Matrix random_mat(Rng& rng, std::size_t r, std::size_t c) {
    Matrix m(r, c);
    for (double& x : m.values) x = rng.uniform(-2.0, 2.0);
    return m;
}

}  // namespace

TEST_CASE("matvec basics") {
    Matrix id(3, 3);
    for (int i = 0; i < 3; ++i) id(i, i) = 1.0;
    Vector v{1, 2, 3};
    Vector r = matvec(id, v);
    CHECK(r[0] == 1.0);
    CHECK(r[1] == 2.0);
    CHECK(r[2] == 3.0);

    Matrix zero(2, 3);
    r = matvec(zero, v);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);

    // Hand summation: [[1,2],[3,4]] * (1,1) = (3,7)
    Matrix m(2, 2);
    m(0, 0) = 1; m(0, 1) = 2; m(1, 0) = 3; m(1, 1) = 4;
    r = matvec(m, Vector{1, 1});
    CHECK(r[0] == 3.0);
    CHECK(r[1] == 7.0);

    CHECK_THROWS_AS(matvec(m, v), ShapeError);
    try {
        matvec(m, v);
    } catch (const ShapeError& e) {
        // Message names both shapes.
        CHECK(std::string(e.what()).find("2x2") != std::string::npos);
        CHECK(std::string(e.what()).find("(3)") != std::string::npos);
    }
}

TEST_CASE("matvec linearity property") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        Matrix m = random_mat(rng, 4, 6);
        Vector u = random_vec(rng, 6);
        Vector v = random_vec(rng, 6);
        Vector lhs = matvec(m, add(u, v));
        Vector rhs = add(matvec(m, u), matvec(m, v));
        for (std::size_t k = 0; k < lhs.dim(); ++k)
            CHECK(std::abs(lhs[k] - rhs[k]) < 1e-12);
    }
}

TEST_CASE("matvec_transposed is the adjoint") {
    Rng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix m = random_mat(rng, 5, 3);
        Vector u = random_vec(rng, 3);
        Vector w = random_vec(rng, 5);
        // <Mu, w> == <u, M^T w>
        CHECK(dot(matvec(m, u), w) == doctest::Approx(dot(u, matvec_transposed(m, w))).epsilon(1e-12));
    }
}

TEST_CASE("concat") {
    Vector r = concat(Vector{1, 2}, Vector{3});
    CHECK(r.dim() == 3);
    CHECK(r[0] == 1.0);
    CHECK(r[2] == 3.0);
    CHECK(concat(Vector(), Vector{5}).dim() == 1);
    CHECK(concat(Vector(7), Vector(4)).dim() == 11);
}

TEST_CASE("hadamard") {
    Vector r = hadamard(Vector{1, 2, 3}, Vector{1, 1, 1});
    CHECK(r[1] == 2.0);
    r = hadamard(Vector{2, -3}, Vector{0.5, 2});
    CHECK(r[0] == 1.0);
    CHECK(r[1] == -6.0);
    CHECK_THROWS_AS(hadamard(Vector{1}, Vector{1, 2}), ShapeError);

    Rng rng(13);
    for (int rep = 0; rep < 30; ++rep) {
        Vector a = random_vec(rng, 6), b = random_vec(rng, 6), c = random_vec(rng, 6);
        Vector ab = hadamard(a, b), ba = hadamard(b, a);
        Vector abc1 = hadamard(ab, c), abc2 = hadamard(a, hadamard(b, c));
        for (std::size_t k = 0; k < 6; ++k) {
            CHECK(std::abs(ab[k] - ba[k]) < 1e-15);
            CHECK(std::abs(abc1[k] - abc2[k]) < 1e-15);
        }
    }
}

TEST_CASE("sigmoid and tanh maps") {
    CHECK(sigmoid_map(Vector{0})[0] == 0.5);
    CHECK(tanh_map(Vector{0})[0] == 0.0);

    // Stable branch: huge negative argument neither overflows nor NaNs.
    const double v = sigmoid_map(Vector{-710})[0];
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    CHECK(v <= 1e-300);
    CHECK(std::isfinite(sigmoid_map(Vector{1000})[0]));

    Rng rng(14);
    for (int rep = 0; rep < 50; ++rep) {
        Vector z = random_vec(rng, 5, -30.0, 30.0);
        Vector s = sigmoid_map(z);
        Vector sneg = sigmoid_map(scale(z, -1.0));
        Vector t = tanh_map(z);
        Vector tneg = tanh_map(scale(z, -1.0));
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(s[k] > 0.0);
            CHECK(s[k] < 1.0);
            CHECK(std::abs(s[k] + sneg[k] - 1.0) < 1e-12);
            CHECK(std::abs(t[k] + tneg[k]) < 1e-15);
        }
    }
}

TEST_CASE("add scale outer") {
    Vector r = add(Vector{1, 2}, Vector{0, 0});
    CHECK(r[0] == 1.0);
    CHECK(r[1] == 2.0);
    r = scale(Vector{1, -2}, 0.0);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
    Matrix m = outer(Vector{1, 2}, Vector{3, 4});
    CHECK(m(0, 0) == 3.0);
    CHECK(m(0, 1) == 4.0);
    CHECK(m(1, 0) == 6.0);
    CHECK(m(1, 1) == 8.0);
    CHECK_THROWS_AS(add(Vector{1}, Vector{1, 2}), ShapeError);
}

TEST_CASE("rng determinism") {
    Rng a(1234), b(1234);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(1235);
    bool differs = false;
    Rng a2(1234);
    for (int i = 0; i < 10; ++i) differs = differs || (a2.next_u64() != c.next_u64());
    CHECK(differs);
}

TEST_CASE("glorot init") {
    Rng a(7), b(7);
    Matrix m1 = glorot_init(a, 2, 3);
    Matrix m2 = glorot_init(b, 2, 3);
    CHECK(m1.values == m2.values);

    Rng rng(8);
    const double limit = std::sqrt(6.0 / 8.0);
    Matrix m = glorot_init(rng, 4, 4);
    for (double v : m.values) {
        CHECK(v >= -limit);
        CHECK(v <= limit);
    }

    Matrix big = glorot_init(rng, 1000, 1000);
    double mean = 0.0;
    for (double v : big.values) mean += v;
    mean /= static_cast<double>(big.size());
    CHECK(std::abs(mean) < 0.01);
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsta {

// Thrown whenever operand shapes disagree; the message names both shapes.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    std::size_t size() const { return values.size(); }
};

struct Vector {
    std::vector<double> values;

    Vector() = default;
    explicit Vector(std::size_t n) : values(n, 0.0) {}
    Vector(std::initializer_list<double> init) : values(init) {}

    std::size_t dim() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

// Deterministic generator: splitmix64-seeded xoshiro256**. Same seed gives the
// same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    // Uniform in [0, 1).
    double uniform();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller.
    double gaussian();
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

Vector matvec(const Matrix& m, const Vector& v);
// result[c] = sum_r m[r,c] * v[r]; the adjoint of matvec, used by backward passes.
Vector matvec_transposed(const Matrix& m, const Vector& v);
Vector concat(const Vector& a, const Vector& b);
Vector hadamard(const Vector& a, const Vector& b);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scale(const Vector& a, double s);
Matrix outer(const Vector& a, const Vector& b);

void add_in_place(Vector& a, const Vector& b);
void add_in_place(Matrix& a, const Matrix& b);
// a += outer(u, v) without materializing the outer product.
void add_outer_in_place(Matrix& a, const Vector& u, const Vector& v);

double dot(const Vector& a, const Vector& b);

Vector sigmoid_map(const Vector& v);
Vector tanh_map(const Vector& v);

double sigmoid(double z);

Matrix glorot_init(Rng& rng, std::size_t rows, std::size_t cols);

void require_dim(const Vector& v, std::size_t dim, const char* what);

}  // namespace lsta

#include "lsta/linalg.hpp"

#include <cmath>

namespace lsta {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

[[noreturn]] void shape_fail(const std::string& msg) {
    throw ShapeError(msg);
}

std::string vec_shape(const Vector& v) {
    return "(" + std::to_string(v.dim()) + ")";
}

std::string mat_shape(const Matrix& m) {
    return "(" + std::to_string(m.rows) + "x" + std::to_string(m.cols) + ")";
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols != v.dim())
        shape_fail("matvec: matrix " + mat_shape(m) + " vs vector " + vec_shape(v));
    Vector out(m.rows);
    const double* row = m.values.data();
    for (std::size_t r = 0; r < m.rows; ++r, row += m.cols) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * v.values[c];
        out[r] = acc;
    }
    return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
    if (m.rows != v.dim())
        shape_fail("matvec_transposed: matrix " + mat_shape(m) + " vs vector " + vec_shape(v));
    Vector out(m.cols);
    const double* row = m.values.data();
    for (std::size_t r = 0; r < m.rows; ++r, row += m.cols) {
        const double vr = v.values[r];
        for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c] * vr;
    }
    return out;
}

Vector concat(const Vector& a, const Vector& b) {
    Vector out(a.dim() + b.dim());
    std::size_t k = 0;
    for (double x : a.values) out[k++] = x;
    for (double x : b.values) out[k++] = x;
    return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim())
        shape_fail("hadamard: " + vec_shape(a) + " vs " + vec_shape(b));
    Vector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] * b[i];
    return out;
}

Vector add(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim())
        shape_fail("add: " + vec_shape(a) + " vs " + vec_shape(b));
    Vector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vector sub(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim())
        shape_fail("sub: " + vec_shape(a) + " vs " + vec_shape(b));
    Vector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector scale(const Vector& a, double s) {
    Vector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] * s;
    return out;
}

Matrix outer(const Vector& a, const Vector& b) {
    Matrix out(a.dim(), b.dim());
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < b.dim(); ++c) out(r, c) = a[r] * b[c];
    return out;
}

void add_in_place(Vector& a, const Vector& b) {
    if (a.dim() != b.dim())
        shape_fail("add_in_place: " + vec_shape(a) + " vs " + vec_shape(b));
    for (std::size_t i = 0; i < a.dim(); ++i) a[i] += b[i];
}

void add_in_place(Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        shape_fail("add_in_place: " + mat_shape(a) + " vs " + mat_shape(b));
    for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += b.values[i];
}

void add_outer_in_place(Matrix& a, const Vector& u, const Vector& v) {
    if (a.rows != u.dim() || a.cols != v.dim())
        shape_fail("add_outer_in_place: " + mat_shape(a) + " vs " + vec_shape(u) + " x " +
                   vec_shape(v));
    double* row = a.values.data();
    for (std::size_t r = 0; r < a.rows; ++r, row += a.cols) {
        const double ur = u[r];
        for (std::size_t c = 0; c < a.cols; ++c) row[c] += ur * v[c];
    }
}

double dot(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim())
        shape_fail("dot: " + vec_shape(a) + " vs " + vec_shape(b));
    double acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
    return acc;
}

double sigmoid(double z) {
    // Branch so the exponential argument is never positive.
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Vector sigmoid_map(const Vector& v) {
    Vector out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) out[i] = sigmoid(v[i]);
    return out;
}

Vector tanh_map(const Vector& v) {
    Vector out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) out[i] = std::tanh(v[i]);
    return out;
}

Matrix glorot_init(Rng& rng, std::size_t rows, std::size_t cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix out(rows, cols);
    for (double& x : out.values) x = rng.uniform(-limit, limit);
    return out;
}

void require_dim(const Vector& v, std::size_t dim, const char* what) {
    if (v.dim() != dim)
        shape_fail(std::string(what) + ": expected dim " + std::to_string(dim) + ", got " +
                   vec_shape(v));
}

}  // namespace lsta

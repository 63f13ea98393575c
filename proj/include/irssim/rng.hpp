// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace irssim {

// Deterministic xoshiro256++ generator. The standard <random> distributions are
// not bit-portable across library implementations, so all sampling used by the
// simulator goes through this class.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed into the full state
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    // Derive an independent stream for a named sub-purpose.
    Rng fork(std::uint64_t stream) const {
        Rng r(*this);
        r.state_[0] ^= 0x8cb92ba72f3d8dd7ULL * (stream + 1);
        r.state_[2] ^= 0xd1342543de82ef95ULL * (stream + 0x51ULL);
        r.next();  // decorrelate
        r.next();
        return r;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_index(std::uint64_t n) {
        // modulo bias is irrelevant at our n << 2^64
        return next() % n;
    }

    // Standard normal via Box-Muller (no cached spare: keeps streams simple).
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // CN(0,1): unit-variance circularly symmetric complex Gaussian.
    std::complex<double> cgaussian() {
        return {gaussian() * M_SQRT1_2, gaussian() * M_SQRT1_2};
    }

    Eigen::VectorXcd cgaussian_vector(int n) {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = cgaussian();
        return v;
    }

    Eigen::MatrixXcd cgaussian_matrix(int rows, int cols) {
        Eigen::MatrixXcd m(rows, cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) m(r, c) = cgaussian();
        return m;
    }

    // Uniform draw from the closed Frobenius ball of the given radius:
    // Gaussian direction scaled by radius * u^(1/dim), dim = real dimension.
    Eigen::MatrixXcd ball_matrix(int rows, int cols, double radius) {
        Eigen::MatrixXcd dir = cgaussian_matrix(rows, cols);
        const double nrm = dir.norm();
        if (nrm == 0.0 || radius == 0.0) return Eigen::MatrixXcd::Zero(rows, cols);
        const double dim = 2.0 * rows * cols;
        const double scale = radius * std::pow(uniform(), 1.0 / dim) / nrm;
        return dir * scale;
    }

    Eigen::VectorXcd ball_vector(int n, double radius) {
        return ball_matrix(n, 1, radius).col(0);
    }

    // Point on the boundary sphere of the ball.
    Eigen::MatrixXcd sphere_matrix(int rows, int cols, double radius) {
        Eigen::MatrixXcd dir = cgaussian_matrix(rows, cols);
        const double nrm = dir.norm();
        if (nrm == 0.0 || radius == 0.0) return Eigen::MatrixXcd::Zero(rows, cols);
        return dir * (radius / nrm);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace irssim

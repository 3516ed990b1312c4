#pragma once

#include "phcpg/solver.hpp"

#include <doctest.h>

#include <random>

namespace phcpg::test {

/// dz/dt = (J - R) z with identity mass and H = |z|^2 / 2; B = 0.
class LinearSystem final : public PHSystem {
public:
    LinearSystem(Matrix j, Matrix r) : j_(std::move(j)), r_(std::move(r)) {}

    [[nodiscard]] int dim() const override { return static_cast<int>(j_.rows()); }
    [[nodiscard]] double hamiltonian(const Vector& z) const override { return 0.5 * z.squaredNorm(); }
    [[nodiscard]] Vector eta(const Vector& z) const override { return z; }
    [[nodiscard]] Vector j_apply(const Vector& v) const override { return j_ * v; }
    [[nodiscard]] Vector r_apply(const Vector& v) const override { return r_ * v; }
    [[nodiscard]] Vector b_apply(double, const Vector& v) const override { return Vector::Zero(v.size()); }

    [[nodiscard]] Matrix generator() const { return j_ - r_; }

private:
    Matrix j_;
    Matrix r_;
};

inline LinearSystem oscillator(double omega = 1.0) {
    Matrix j{{0.0, omega}, {-omega, 0.0}};
    return {j, Matrix::Zero(2, 2)};
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240917);
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Vector random_vector(int n, double scale = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-scale, scale);
    return v;
}

/// integrate() followed by the continuity and initial-condition invariants.
inline CpgSolution integrate_checked(const PHSystem& system, const Vector& z0, const TimePartition& partition,
                                     const SolverConfig& config) {
    CpgSolution sol = integrate(system, z0, partition, config);
    CHECK(continuity_defect(sol) <= 1e-13);
    CHECK(initial_defect(sol, z0) <= 1e-14 * (1.0 + z0.lpNorm<Eigen::Infinity>()));
    Vector z_left = z0;
    for (const auto& seg : sol.segments) {
        const Vector r = assemble_local_residual(system, seg.interval(), z_left, seg.derivative().coeffs(), config);
        CHECK(r.lpNorm<Eigen::Infinity>() <= 10.0 * config.newton_tol);
        z_left = seg.eval_right();
    }
    return sol;
}

}  // namespace phcpg::test

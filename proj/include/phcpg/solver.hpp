#pragma once

#include "phcpg/basis.hpp"
#include "phcpg/phsystem.hpp"
#include "phcpg/quadrature.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace phcpg {

enum class JacobianMode {
    FiniteDifference,  // forward differences of the full local residual
    Structured,        // chain rule through the system's local Jacobians
};

struct SolverConfig {
    int k = 1;      // trial degree
    int s_q = 1;    // nodes of the right-hand-side quadrature
    int s_pi = 1;   // nodes of the projection quadrature
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
    /// Relative FD step factor; sqrt(eps) when unset. Step is factor*(1+|x_i|).
    std::optional<double> fd_jacobian_step;
    JacobianMode jacobian_mode = JacobianMode::FiniteDifference;

    /// Throws std::invalid_argument on k < 1, s_q < 1, s_pi < 1, tol <= 0.
    void validate() const;
};

/// Strictly increasing grid t_0 < ... < t_m.
class TimePartition {
public:
    explicit TimePartition(std::vector<double> points);
    static TimePartition uniform(double t0, double t_end, int steps);

    [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
    [[nodiscard]] int num_steps() const noexcept { return static_cast<int>(points_.size()) - 1; }
    /// Interval of 0-based step i, i.e. [t_i, t_{i+1}].
    [[nodiscard]] Interval interval(int i) const;
    [[nodiscard]] double max_step() const noexcept { return max_step_; }
    [[nodiscard]] double start() const noexcept { return points_.front(); }
    [[nodiscard]] double end() const noexcept { return points_.back(); }

private:
    std::vector<double> points_;
    double max_step_ = 0.0;
};

/// Continuous piecewise polynomial trajectory of degree k.
struct CpgSolution {
    TimePartition partition;
    std::vector<SegmentPoly> segments;
    std::vector<int> newton_iters;
    std::vector<double> residual_norms;
    SolverConfig config;

    /// Dense output; grid points resolve to the segment on their left
    /// except t_0.
    [[nodiscard]] Vector eval(double t) const;
};

[[nodiscard]] Vector eval_solution(const CpgSolution& sol, double t);

/// Max over interior grid points of |left - right| / (1 + |left|).
[[nodiscard]] double continuity_defect(const CpgSolution& sol);

/// |z_tau(t_0) - z0|_inf.
[[nodiscard]] double initial_defect(const CpgSolution& sol, const Vector& z0);

class SingularJacobianError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by integrate when a step's Newton iteration fails; carries the
/// trajectory computed so far.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(int step, double residual, CpgSolution partial);

    [[nodiscard]] int step() const noexcept { return step_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }
    [[nodiscard]] const CpgSolution& partial() const noexcept { return partial_; }

private:
    int step_;
    double residual_;
    CpgSolution partial_;
};

/// Precomputed basis and quadrature tables for one (k, s_q, s_pi) triple.
/// Immutable; share across steps and threads.
class StepKernel {
public:
    explicit StepKernel(const SolverConfig& config);

    [[nodiscard]] const SolverConfig& config() const noexcept { return config_; }
    [[nodiscard]] const QuadratureRule& rule_q() const noexcept { return rule_q_; }
    [[nodiscard]] const QuadratureRule& rule_pi() const noexcept { return rule_pi_; }

    /// Residual of the local cPG equations, flattened column-major from the
    /// dim x k matrix: entry (a, j) is (M d)_{a,j} - Q_i[L_j rhs(., v)_a]
    /// where v is the projected eta of the reconstructed segment.
    [[nodiscard]] Vector residual(const PHSystem& system, const Interval& interval, const Vector& z_left,
                                  const Matrix& d) const;

    /// Jacobian of residual with respect to the flattened d.
    [[nodiscard]] Matrix jacobian(const PHSystem& system, const Interval& interval, const Vector& z_left,
                                  const Matrix& d) const;

private:
    [[nodiscard]] Matrix structured_jacobian(const PHSystem& system, const Interval& interval,
                                             const Vector& z_left, const Matrix& d) const;

    SolverConfig config_;
    QuadratureRule rule_q_;
    QuadratureRule rule_pi_;
    Matrix antideriv_;    // (k+1) x k, unit antiderivative coordinates
    Matrix trial_at_pi_;  // (k+1) x s_pi, Lhat_0..Lhat_k at projection nodes
    Matrix test_at_pi_;   // k x s_pi
    Matrix test_at_q_;    // k x s_q
    Matrix mix_;          // s_q x s_pi, v(zeta_l) = sum_p mix(l,p) eta(z(xi_p))
};

[[nodiscard]] Vector assemble_local_residual(const PHSystem& system, const Interval& interval,
                                             const Vector& z_left, const Matrix& d,
                                             const SolverConfig& config);

struct StepResult {
    Matrix d;  // dim x k coefficients of dz/dt
    int iters = 0;
    double residual_norm = 0.0;
    bool converged = false;
};

/// Newton iteration on the local equations. Returns the best iterate with
/// converged = false when the iteration budget runs out. Throws
/// SingularJacobianError when the LU factorisation breaks down.
[[nodiscard]] StepResult newton_step_solve(const StepKernel& kernel, const PHSystem& system,
                                           const Interval& interval, const Vector& z_left,
                                           const Matrix& initial_guess);
[[nodiscard]] StepResult newton_step_solve(const PHSystem& system, const Interval& interval,
                                           const Vector& z_left, const SolverConfig& config);

/// Sequential cPG time stepping from z0 over the partition.
[[nodiscard]] CpgSolution integrate(const PHSystem& system, const Vector& z0, const TimePartition& partition,
                                    const SolverConfig& config);

}  // namespace phcpg

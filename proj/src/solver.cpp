#include "phcpg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace phcpg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Matrix unflatten(const Vector& x, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const Matrix>(x.data(), rows, cols);
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

}  // namespace

void SolverConfig::validate() const {
    if (k < 1) throw std::invalid_argument("polynomial degree k must be >= 1");
    if (s_q < 1 || s_q > kMaxQuadratureNodes) throw std::invalid_argument("s_q out of range");
    if (s_pi < 1 || s_pi > kMaxQuadratureNodes) throw std::invalid_argument("s_pi out of range");
    if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
    if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be >= 1");
    if (fd_jacobian_step && !(*fd_jacobian_step > 0.0)) {
        throw std::invalid_argument("fd_jacobian_step must be positive");
    }
}

// ---------------------------------------------------------------------------
// TimePartition

TimePartition::TimePartition(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw std::invalid_argument("time partition needs at least two points");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        const double w = points_[i] - points_[i - 1];
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("time partition must be strictly increasing (index " +
                                        std::to_string(i) + ")");
        }
        max_step_ = std::max(max_step_, w);
    }
}

TimePartition TimePartition::uniform(double t0, double t_end, int steps) {
    if (steps < 1) throw std::invalid_argument("uniform partition needs >= 1 step");
    std::vector<double> pts(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) pts[i] = t0 + (t_end - t0) * i / steps;
    pts.back() = t_end;
    return TimePartition(std::move(pts));
}

Interval TimePartition::interval(int i) const {
    if (i < 0 || i >= num_steps()) throw std::out_of_range("step index out of range");
    return {points_[i], points_[i + 1]};
}

// ---------------------------------------------------------------------------
// CpgSolution

Vector CpgSolution::eval(double t) const {
    const auto& pts = partition.points();
    const double slack = 4.0 * kEps * (pts.back() - pts.front());
    if (!(t >= pts.front() - slack && t <= pts.back() + slack)) {
        throw std::out_of_range("time " + std::to_string(t) + " outside solution interval");
    }
    if (segments.empty()) throw std::logic_error("empty solution");
    auto it = std::lower_bound(pts.begin(), pts.end(), t);
    auto idx = static_cast<std::size_t>(std::distance(pts.begin(), it));
    const std::size_t seg = idx == 0 ? 0 : std::min(idx - 1, segments.size() - 1);
    const Interval& iv = segments[seg].interval();
    return segments[seg].eval(std::clamp(t, iv.a, iv.b));
}

Vector eval_solution(const CpgSolution& sol, double t) { return sol.eval(t); }

double continuity_defect(const CpgSolution& sol) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < sol.segments.size(); ++i) {
        const Vector left = sol.segments[i].eval_right();
        const Vector right = sol.segments[i + 1].eval_left();
        worst = std::max(worst, sup_norm(left - right) / (1.0 + sup_norm(left)));
    }
    return worst;
}

double initial_defect(const CpgSolution& sol, const Vector& z0) {
    return sup_norm(sol.segments.front().eval_left() - z0);
}

NonConvergenceError::NonConvergenceError(int step, double residual, CpgSolution partial)
    : std::runtime_error("Newton iteration did not converge at step " + std::to_string(step) +
                         " (residual " + std::to_string(residual) + ")"),
      step_(step),
      residual_(residual),
      partial_(std::move(partial)) {}

// ---------------------------------------------------------------------------
// StepKernel

StepKernel::StepKernel(const SolverConfig& config)
    : config_(config),
      rule_q_(gauss_legendre_unit(config.s_q)),
      rule_pi_(gauss_legendre_unit(config.s_pi)) {
    config_.validate();
    const int k = config_.k;
    antideriv_ = unit_antiderivative_matrix(k);
    trial_at_pi_ = orthonormal_legendre_values(k, rule_pi_.nodes);
    test_at_pi_ = trial_at_pi_.topRows(k);
    test_at_q_ = orthonormal_legendre_values(k - 1, rule_q_.nodes);
    const Eigen::Map<const Vector> w_pi(rule_pi_.weights.data(), rule_pi_.size());
    mix_ = test_at_q_.transpose() * test_at_pi_ * w_pi.asDiagonal();
}

Vector StepKernel::residual(const PHSystem& system, const Interval& iv, const Vector& z_left,
                            const Matrix& d) const {
    const double tau = iv.width();
    const double root_tau = std::sqrt(tau);
    const int dim = system.dim();

    // Segment coefficients by antidifferentiation, then values at projection nodes.
    Matrix cz = tau * d * antideriv_.transpose();
    cz.col(0) += root_tau * z_left;
    const Matrix z_pi = cz * trial_at_pi_ / root_tau;

    Matrix eta_pi(dim, rule_pi_.size());
    for (int p = 0; p < rule_pi_.size(); ++p) {
        eta_pi.col(p) = system.eta(z_pi.col(p));
        if (!eta_pi.col(p).allFinite()) {
            throw DomainError("eta not finite at projection node t=" +
                              std::to_string(iv.a + tau * rule_pi_.nodes[p]));
        }
    }
    const Matrix v_q = eta_pi * mix_.transpose();

    Matrix weighted_rhs(dim, rule_q_.size());
    for (int l = 0; l < rule_q_.size(); ++l) {
        const double t = iv.a + tau * rule_q_.nodes[l];
        weighted_rhs.col(l) = rule_q_.weights[l] * rhs(system, t, v_q.col(l));
        if (!weighted_rhs.col(l).allFinite()) {
            throw DomainError("right-hand side not finite at quadrature node t=" + std::to_string(t));
        }
    }

    Matrix res = root_tau * weighted_rhs * test_at_q_.transpose();
    const auto& mass = system.mass();
    res = (mass ? Matrix(*mass * d) : d) - res;
    return flatten(res);
}

Matrix StepKernel::jacobian(const PHSystem& system, const Interval& iv, const Vector& z_left,
                            const Matrix& d) const {
    if (config_.jacobian_mode == JacobianMode::Structured) return structured_jacobian(system, iv, z_left, d);

    const Eigen::Index rows = d.rows();
    const Eigen::Index cols = d.cols();
    auto f = [&](const Vector& x) { return residual(system, iv, z_left, unflatten(x, rows, cols)); };
    const Vector x = flatten(d);
    const Vector fx = f(x);
    if (!config_.fd_jacobian_step) return forward_difference_jacobian(f, x, fx);

    Matrix jac(fx.size(), x.size());
    Vector xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + *config_.fd_jacobian_step * (1.0 + std::abs(x[i]));
        jac.col(i) = (f(xp) - fx) / (xp[i] - x[i]);
        xp[i] = x[i];
    }
    return jac;
}

Matrix StepKernel::structured_jacobian(const PHSystem& system, const Interval& iv, const Vector& z_left,
                                       const Matrix& d) const {
    const double tau = iv.width();
    const double root_tau = std::sqrt(tau);
    const int dim = system.dim();
    const int k = config_.k;
    const int s_pi = rule_pi_.size();
    const int s_q = rule_q_.size();

    Matrix cz = tau * d * antideriv_.transpose();
    cz.col(0) += root_tau * z_left;
    const Matrix z_pi = cz * trial_at_pi_ / root_tau;
    // dz(xi_p)/dd_j = alpha(j,p) * Id
    const Matrix alpha = root_tau * antideriv_.transpose() * trial_at_pi_;

    std::vector<Matrix> eta_jac(s_pi);
    Matrix eta_pi(dim, s_pi);
    for (int p = 0; p < s_pi; ++p) {
        eta_pi.col(p) = system.eta(z_pi.col(p));
        eta_jac[p] = system.eta_jacobian(z_pi.col(p));
    }
    const Matrix v_q = eta_pi * mix_.transpose();

    Matrix jac = Matrix::Zero(static_cast<Eigen::Index>(dim) * k, static_cast<Eigen::Index>(dim) * k);
    const auto& mass = system.mass();
    for (int j = 0; j < k; ++j) {
        auto block = jac.block(j * dim, j * dim, dim, dim);
        if (mass) {
            block = *mass;
        } else {
            block.setIdentity();
        }
    }

    Matrix g(dim, dim);
    for (int l = 0; l < s_q; ++l) {
        const double t = iv.a + tau * rule_q_.nodes[l];
        const Matrix f_jac = rhs_jacobian(system, t, v_q.col(l));
        for (int jp = 0; jp < k; ++jp) {
            g.setZero();
            for (int p = 0; p < s_pi; ++p) g += (mix_(l, p) * alpha(jp, p)) * eta_jac[p];
            const Matrix h = f_jac * g;
            for (int j = 0; j < k; ++j) {
                jac.block(j * dim, jp * dim, dim, dim) -= (root_tau * rule_q_.weights[l] * test_at_q_(j, l)) * h;
            }
        }
    }
    return jac;
}

Vector assemble_local_residual(const PHSystem& system, const Interval& interval, const Vector& z_left,
                               const Matrix& d, const SolverConfig& config) {
    require_valid(interval);
    if (d.rows() != system.dim() || d.cols() != config.k || z_left.size() != system.dim()) {
        throw std::invalid_argument("local residual: unknowns must be dim x k and z_left of length dim");
    }
    return StepKernel(config).residual(system, interval, z_left, d);
}

// ---------------------------------------------------------------------------
// Newton

StepResult newton_step_solve(const StepKernel& kernel, const PHSystem& system, const Interval& interval,
                             const Vector& z_left, const Matrix& initial_guess) {
    const auto& cfg = kernel.config();
    StepResult best{initial_guess, 0, 0.0, false};
    Matrix d = initial_guess;
    Vector res = kernel.residual(system, interval, z_left, d);
    double norm = sup_norm(res);
    best.residual_norm = norm;

    int iters = 0;
    while (norm > cfg.newton_tol && iters < cfg.newton_max_iter) {
        const Matrix jac = kernel.jacobian(system, interval, z_left, d);
        Eigen::PartialPivLU<Matrix> lu(jac);
        const auto diag = lu.matrixLU().diagonal().cwiseAbs();
        if (!jac.allFinite() || diag.minCoeff() <= std::numeric_limits<double>::min() * diag.maxCoeff() ||
            diag.maxCoeff() == 0.0) {
            throw SingularJacobianError("singular Newton Jacobian on [" + std::to_string(interval.a) + ", " +
                                        std::to_string(interval.b) + "]");
        }
        const Vector delta = lu.solve(res);
        if (!delta.allFinite()) throw SingularJacobianError("Newton update is not finite");
        d -= unflatten(delta, d.rows(), d.cols());
        ++iters;
        res = kernel.residual(system, interval, z_left, d);
        norm = sup_norm(res);
        if (norm < best.residual_norm) {
            best.d = d;
            best.residual_norm = norm;
        }
    }
    best.iters = iters;
    best.converged = best.residual_norm <= cfg.newton_tol;
    return best;
}

StepResult newton_step_solve(const PHSystem& system, const Interval& interval, const Vector& z_left,
                             const SolverConfig& config) {
    require_valid(interval);
    const StepKernel kernel(config);
    return newton_step_solve(kernel, system, interval, z_left, Matrix::Zero(system.dim(), config.k));
}

CpgSolution integrate(const PHSystem& system, const Vector& z0, const TimePartition& partition,
                      const SolverConfig& config) {
    if (z0.size() != system.dim()) throw std::invalid_argument("initial datum has wrong dimension");
    if (!z0.allFinite()) throw std::invalid_argument("initial datum is not finite");
    const StepKernel kernel(config);

    CpgSolution sol{partition, {}, {}, {}, config};
    const int steps = partition.num_steps();
    sol.segments.reserve(steps);
    sol.newton_iters.reserve(steps);
    sol.residual_norms.reserve(steps);

    Vector z_left = z0;
    Matrix guess = Matrix::Zero(system.dim(), config.k);
    double prev_tau = 0.0;
    for (int i = 0; i < steps; ++i) {
        const Interval iv = partition.interval(i);
        // d carries a sqrt(tau) factor; rescale so the reused guess keeps the
        // previous step's derivative profile on non-uniform grids.
        if (i > 0) guess *= std::sqrt(iv.width() / prev_tau);
        StepResult step = newton_step_solve(kernel, system, iv, z_left, guess);
        SegmentPoly seg = SegmentPoly::antiderivative_from_left(SegmentPoly(iv, step.d), z_left);
        if (!step.converged) {
            throw NonConvergenceError(i, step.residual_norm, std::move(sol));
        }
        z_left = seg.eval_right();
        sol.segments.push_back(std::move(seg));
        sol.newton_iters.push_back(step.iters);
        sol.residual_norms.push_back(step.residual_norm);
        guess = std::move(step.d);
        prev_tau = iv.width();
    }
    return sol;
}

}  // namespace phcpg

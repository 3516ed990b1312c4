#pragma once

#include "phcpg/models.hpp"
#include "phcpg/solver.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace phcpg {

using TrajectoryFn = std::function<Vector(double)>;

/// A base system together with a prescribed exact trajectory and its
/// analytic time derivative.
struct ManufacturedCase {
    std::shared_ptr<const PHSystem> base;
    TrajectoryFn z_exact;
    TrajectoryFn dz_exact;
};

/// The base system with B replaced by the state-independent forcing
///
///     Bbar(t) = M dz(t) - J(eta(z(t))) + R(eta(z(t))),
///
/// for which z_exact solves the system exactly. J, R, H and M are forwarded
/// unchanged.
class ManufacturedSystem final : public PHSystem {
public:
    explicit ManufacturedSystem(ManufacturedCase c);

    [[nodiscard]] int dim() const override { return case_.base->dim(); }
    [[nodiscard]] double hamiltonian(const Vector& z) const override { return case_.base->hamiltonian(z); }
    [[nodiscard]] Vector eta(const Vector& z) const override { return case_.base->eta(z); }
    [[nodiscard]] Vector j_apply(const Vector& v) const override { return case_.base->j_apply(v); }
    [[nodiscard]] Vector r_apply(const Vector& v) const override { return case_.base->r_apply(v); }
    [[nodiscard]] Vector b_apply(double t, const Vector& v) const override;
    [[nodiscard]] const std::optional<Matrix>& mass() const override { return case_.base->mass(); }
    [[nodiscard]] Matrix eta_jacobian(const Vector& z) const override { return case_.base->eta_jacobian(z); }
    [[nodiscard]] Matrix jr_jacobian(const Vector& v) const override { return case_.base->jr_jacobian(v); }
    [[nodiscard]] Matrix b_jacobian(double t, const Vector& v) const override;

    [[nodiscard]] Vector initial_datum() const { return case_.z_exact(0.0); }
    [[nodiscard]] const ManufacturedCase& manufactured_case() const noexcept { return case_; }

private:
    ManufacturedCase case_;
};

[[nodiscard]] std::shared_ptr<const ManufacturedSystem> wrap_manufactured(ManufacturedCase c);

/// M dz - (J - R)(eta(z)) - B(t, eta(z)) at t for the given system; zero
/// when z_exact solves it.
[[nodiscard]] Vector manufactured_defect(const PHSystem& system, const ManufacturedCase& c, double t);

/// q_i = sin t, p_i = cos t.
[[nodiscard]] ManufacturedCase toda_manufactured(const TodaParams& params);
/// p1 = sin t, p2 = sin(2t) cos^2 t + 1/2, p3 = cos t.
[[nodiscard]] ManufacturedCase rigid_body_manufactured(const RigidBodyParams& params);
/// rho = v = sin t sin x at cell midpoints and grid points.
[[nodiscard]] ManufacturedCase damped_wave_manufactured(const WaveParams& params);

/// Uniform sampling grid of step tau_ref on [t0, t_end], always ending at t_end.
[[nodiscard]] std::vector<double> sampling_grid(double t0, double t_end, double tau_ref);

/// Max over the sampling grid of |z_exact(t) - z_tau(t)|, Euclidean or, when
/// weight is given, sqrt(e^T W e).
[[nodiscard]] double linf_error(const CpgSolution& sol, const TrajectoryFn& z_exact, double tau_ref,
                                const std::optional<Matrix>& weight = std::nullopt);

/// As linf_error, sampled at the grid points t_0..t_m only.
[[nodiscard]] double nodal_error(const CpgSolution& sol, const TrajectoryFn& z_exact,
                                 const std::optional<Matrix>& weight = std::nullopt);

/// Empirical order of convergence between consecutive rows.
struct Rate {
    enum class Status { Undefined, Value, BelowFloor };
    Status status = Status::Undefined;
    double value = 0.0;

    [[nodiscard]] bool has_value() const noexcept { return status == Status::Value; }
};

/// rate_i = log(err_{i-1}/err_i) / log(tau_{i-1}/tau_i); entry 0 is Undefined,
/// and pairs with a nonpositive error are BelowFloor.
[[nodiscard]] std::vector<Rate> eoc(const std::vector<double>& taus, const std::vector<double>& errors);

struct ConvergenceRecord {
    double tau = 0.0;
    double err_inf = 0.0;
    double err_nodal = 0.0;
    Rate eoc_inf;
    Rate eoc_nodal;
};

}  // namespace phcpg

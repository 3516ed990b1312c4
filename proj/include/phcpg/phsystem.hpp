#pragma once

#include "phcpg/types.hpp"

#include <optional>

namespace phcpg {

/// Finite-dimensional port-Hamiltonian system
///
///     M dz/dt = J(eta(z)) - R(eta(z)) + B(t, eta(z)),
///
/// with Hamiltonian H, eta = M^{-1} grad H and an optional constant SPD mass
/// matrix M (identity when absent). Implementations are immutable after
/// construction and every method must be safe to call concurrently.
class PHSystem {
public:
    virtual ~PHSystem() = default;

    [[nodiscard]] virtual int dim() const = 0;
    [[nodiscard]] virtual double hamiltonian(const Vector& z) const = 0;
    [[nodiscard]] virtual Vector eta(const Vector& z) const = 0;
    [[nodiscard]] virtual Vector j_apply(const Vector& v) const = 0;
    [[nodiscard]] virtual Vector r_apply(const Vector& v) const = 0;
    [[nodiscard]] virtual Vector b_apply(double t, const Vector& v) const = 0;

    /// Constant SPD mass matrix; std::nullopt means identity.
    [[nodiscard]] virtual const std::optional<Matrix>& mass() const;

    // Local Jacobians used by the structured Newton Jacobian. The defaults
    // fall back to forward differences; models override with closed forms.
    [[nodiscard]] virtual Matrix eta_jacobian(const Vector& z) const;
    /// Jacobian of v -> J(v) - R(v).
    [[nodiscard]] virtual Matrix jr_jacobian(const Vector& v) const;
    /// Jacobian of v -> B(t, v).
    [[nodiscard]] virtual Matrix b_jacobian(double t, const Vector& v) const;

private:
    static const std::optional<Matrix> kNoMass;
};

/// J(v) - R(v) + B(t, v).
[[nodiscard]] Vector rhs(const PHSystem& system, double t, const Vector& v);

/// Jacobian of rhs with respect to v.
[[nodiscard]] Matrix rhs_jacobian(const PHSystem& system, double t, const Vector& v);

/// M * v, or v when the system has no mass matrix.
[[nodiscard]] Vector apply_mass(const PHSystem& system, const Vector& v);

/// Forward-difference Jacobian of f at x with steps sqrt(eps)*(1+|x_i|).
template <class F>
[[nodiscard]] Matrix forward_difference_jacobian(F&& f, const Vector& x, const Vector& fx);

/// Max componentwise relative deviation between M*eta(z) and the central
/// difference gradient of H with step h. Components whose gradient
/// magnitude is below one are compared absolutely.
[[nodiscard]] double check_gradient(const PHSystem& system, const Vector& z, double h);

/// |<J(v), v>| / (1 + |v|^2).
[[nodiscard]] double conservativity_defect(const PHSystem& system, const Vector& v);

/// <R(v), v>, which must be nonnegative.
[[nodiscard]] double dissipation_form(const PHSystem& system, const Vector& v);

/// True when the mass matrix is absent, or symmetric to 1e-13 and Cholesky
/// succeeds.
[[nodiscard]] bool mass_is_spd(const PHSystem& system);

}  // namespace phcpg

#include "phcpg/detail/fd_jacobian.ipp"

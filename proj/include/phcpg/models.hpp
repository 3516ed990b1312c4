#pragma once

#include "phcpg/phsystem.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace phcpg {

using ScalarFn = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Toda lattice: N particles, exponential nearest-neighbour springs.

struct TodaParams {
    int N = 5;
    std::vector<double> gamma;  // N damping parameters

    /// N particles with uniform damping g.
    static TodaParams uniform(int N, double g);
    void validate() const;
};

class TodaSystem final : public PHSystem {
public:
    TodaSystem(TodaParams params, ScalarFn control);

    [[nodiscard]] int dim() const override { return 2 * params_.N; }
    [[nodiscard]] double hamiltonian(const Vector& z) const override;
    [[nodiscard]] Vector eta(const Vector& z) const override;
    [[nodiscard]] Vector j_apply(const Vector& v) const override;
    [[nodiscard]] Vector r_apply(const Vector& v) const override;
    [[nodiscard]] Vector b_apply(double t, const Vector& v) const override;
    [[nodiscard]] Matrix eta_jacobian(const Vector& z) const override;
    [[nodiscard]] Matrix jr_jacobian(const Vector& v) const override;
    [[nodiscard]] Matrix b_jacobian(double t, const Vector& v) const override;

    [[nodiscard]] const TodaParams& params() const noexcept { return params_; }

private:
    TodaParams params_;
    ScalarFn control_;
};

[[nodiscard]] std::shared_ptr<const TodaSystem> make_toda(TodaParams params, ScalarFn control);

// ---------------------------------------------------------------------------
// Rigid body spinning about its centre of mass; state = angular momenta.

struct RigidBodyParams {
    std::array<double, 3> inertia{1.0, 1.0, 1.0};
    std::array<double, 3> axis{1.0, 1.0, 1.0};

    void validate() const;
};

class RigidBodySystem final : public PHSystem {
public:
    RigidBodySystem(RigidBodyParams params, ScalarFn control);

    [[nodiscard]] int dim() const override { return 3; }
    [[nodiscard]] double hamiltonian(const Vector& z) const override;
    [[nodiscard]] Vector eta(const Vector& z) const override;
    /// (Q^{-1} v) x v with Q = diag(1/I_i).
    [[nodiscard]] Vector j_apply(const Vector& v) const override;
    [[nodiscard]] Vector r_apply(const Vector& v) const override;
    [[nodiscard]] Vector b_apply(double t, const Vector& v) const override;
    [[nodiscard]] Matrix eta_jacobian(const Vector& z) const override;
    [[nodiscard]] Matrix jr_jacobian(const Vector& v) const override;
    [[nodiscard]] Matrix b_jacobian(double t, const Vector& v) const override;

private:
    RigidBodyParams params_;
    ScalarFn control_;
};

[[nodiscard]] std::shared_ptr<const RigidBodySystem> make_rigid_body(RigidBodyParams params, ScalarFn control);

// ---------------------------------------------------------------------------
// Quasilinear damped wave equation on [0, ell], mixed P0/P1 elements in
// space, pressure p(rho) = rho + rho^3 and friction F(v) = v sqrt(1+v^2).
// State w = (rho cell values (N+1), v nodal values (N+2)).

struct WaveParams {
    int N = 10;
    double ell = 10.0;
    double gamma = 0.1;
    double nu = 0.0;
    int rf_quad_nodes = 10;

    [[nodiscard]] double h() const { return ell / (N + 1); }
    [[nodiscard]] int dim() const { return 2 * N + 3; }
    void validate() const;
};

class DampedWaveSystem final : public PHSystem {
public:
    DampedWaveSystem(WaveParams params, ScalarFn g0, ScalarFn g_ell);

    [[nodiscard]] int dim() const override { return params_.dim(); }
    [[nodiscard]] double hamiltonian(const Vector& w) const override;
    [[nodiscard]] Vector eta(const Vector& w) const override;
    [[nodiscard]] Vector j_apply(const Vector& v) const override;
    [[nodiscard]] Vector r_apply(const Vector& v) const override;
    [[nodiscard]] Vector b_apply(double t, const Vector& v) const override;
    [[nodiscard]] const std::optional<Matrix>& mass() const override { return mass_; }
    [[nodiscard]] Matrix eta_jacobian(const Vector& w) const override;
    [[nodiscard]] Matrix jr_jacobian(const Vector& v) const override;
    [[nodiscard]] Matrix b_jacobian(double t, const Vector& v) const override;

    [[nodiscard]] const WaveParams& params() const noexcept { return params_; }
    /// Forward-difference stencil D, (N+1) x (N+2).
    [[nodiscard]] const Matrix& difference() const noexcept { return diff_; }
    /// Unit-scaled P1 mass matrix M; the v-block of the mass matrix is h*M.
    [[nodiscard]] const Matrix& p1_mass() const noexcept { return p1_mass_; }
    /// P1 stiffness matrix.
    [[nodiscard]] const Matrix& stiffness() const noexcept { return stiffness_; }
    /// P1 mass matrix weighted with psi(v_h) = (1+v_h^2)/sqrt(1+v_h^2).
    [[nodiscard]] Matrix friction_matrix(const Vector& v_nodes) const;
    /// Jacobian of v -> friction_matrix(v) v, i.e. the P1 mass matrix weighted with F'(v_h).
    [[nodiscard]] Matrix friction_tangent(const Vector& v_nodes) const;

    /// Cell midpoints (N+1) and grid points (N+2).
    [[nodiscard]] std::vector<double> midpoints() const;
    [[nodiscard]] std::vector<double> grid_points() const;
    /// State from rho sampled at midpoints and v at grid points.
    [[nodiscard]] Vector sample_state(const ScalarFn& rho, const ScalarFn& v) const;

private:
    template <class Weight>
    [[nodiscard]] Matrix weighted_p1_mass(const Vector& v_nodes, Weight&& weight) const;

    WaveParams params_;
    ScalarFn g0_;
    ScalarFn g_ell_;
    Matrix diff_;
    Matrix p1_mass_;
    Matrix stiffness_;
    std::optional<Matrix> mass_;
    std::vector<double> cell_nodes_;
    std::vector<double> cell_weights_;
};

[[nodiscard]] std::shared_ptr<const DampedWaveSystem> make_damped_wave(WaveParams params, ScalarFn g0,
                                                                       ScalarFn g_ell);

}  // namespace phcpg

#pragma once

#include "phcpg/phsystem.hpp"
#include "phcpg/solver.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace phcpg {

/// Per-step energy accounting of a cPG solution. Index i of H and t runs
/// over grid points 0..m; dissipation, supply and E over steps 1..m
/// (stored 0-based).
struct EnergyReport {
    std::vector<double> t;
    std::vector<double> H;
    std::vector<double> dissipation;  // Q_i[<R(v), v>], v = projected eta
    std::vector<double> supply;       // Q_i[<B(., v), v>]
    std::vector<double> E;            // relative balance error
    double denominator = 0.0;

    [[nodiscard]] double max_E() const;
};

/// Relative energy-balance error per step,
///
///   E_i = |H_i - H_{i-1} + dissipation_i - supply_i| / max_j |H_j - H_{j-1}|,
///
/// using the same projection rule as the solver. The denominator is floored
/// at 1e3 * eps * (1 + max_j |H_j|). Throws std::invalid_argument when config
/// differs from the one the solution was computed with.
[[nodiscard]] EnergyReport energy_balance_report(const PHSystem& system, const CpgSolution& sol,
                                                 const SolverConfig& config);

[[nodiscard]] std::vector<std::pair<double, double>> hamiltonian_trace(const PHSystem& system,
                                                                       const CpgSolution& sol,
                                                                       const std::vector<double>& sample_times);

/// d/dt H(z(t)) + <R(eta), eta> - <B(t, eta), eta> at t, with the time
/// derivative by central differences of step h_fd. Vanishes for exact
/// trajectories up to the difference error.
[[nodiscard]] double power_balance_residual(const PHSystem& system,
                                            const std::function<Vector(double)>& z_fn, double t,
                                            double h_fd);

}  // namespace phcpg

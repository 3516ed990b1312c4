#include "phcpg/energy.hpp"

#include "phcpg/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace phcpg {

double EnergyReport::max_E() const { return E.empty() ? 0.0 : *std::max_element(E.begin(), E.end()); }

EnergyReport energy_balance_report(const PHSystem& system, const CpgSolution& sol, const SolverConfig& config) {
    if (config.k != sol.config.k || config.s_q != sol.config.s_q || config.s_pi != sol.config.s_pi) {
        throw std::invalid_argument("energy report config (k, s_q, s_pi) differs from the solution's");
    }
    const QuadratureRule rule_q = gauss_legendre_unit(config.s_q);
    const QuadratureRule rule_pi = gauss_legendre_unit(config.s_pi);
    const int m = static_cast<int>(sol.segments.size());

    EnergyReport rep;
    rep.t = sol.partition.points();
    rep.H.resize(m + 1);
    rep.dissipation.resize(m);
    rep.supply.resize(m);
    rep.E.resize(m);
    std::vector<double> increments(m);

    for (int i = 0; i < m; ++i) {
        const SegmentPoly& seg = sol.segments[i];
        const double h_left = system.hamiltonian(seg.eval_left());
        const double h_right = system.hamiltonian(seg.eval_right());
        if (i == 0) rep.H[0] = h_left;
        rep.H[i + 1] = h_right;
        increments[i] = h_right - h_left;

        const SegmentPoly v = project_eta_of_segment(seg, system, rule_pi);
        const auto times = map_nodes(rule_q, seg.interval());
        std::vector<double> diss(times.size());
        std::vector<double> sup(times.size());
        for (std::size_t l = 0; l < times.size(); ++l) {
            const Vector vl = v.eval(times[l]);
            diss[l] = system.r_apply(vl).dot(vl);
            sup[l] = system.b_apply(times[l], vl).dot(vl);
        }
        rep.dissipation[i] = apply(rule_q, seg.interval(), diss);
        rep.supply[i] = apply(rule_q, seg.interval(), sup);
    }

    double max_inc = 0.0;
    double max_h = 0.0;
    for (int i = 0; i < m; ++i) max_inc = std::max(max_inc, std::abs(increments[i]));
    for (double h : rep.H) max_h = std::max(max_h, std::abs(h));
    rep.denominator = std::max(max_inc, 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + max_h));
    for (int i = 0; i < m; ++i) {
        rep.E[i] = std::abs(increments[i] + rep.dissipation[i] - rep.supply[i]) / rep.denominator;
    }
    return rep;
}

std::vector<std::pair<double, double>> hamiltonian_trace(const PHSystem& system, const CpgSolution& sol,
                                                         const std::vector<double>& sample_times) {
    std::vector<std::pair<double, double>> out;
    out.reserve(sample_times.size());
    for (double t : sample_times) out.emplace_back(t, system.hamiltonian(sol.eval(t)));
    return out;
}

double power_balance_residual(const PHSystem& system, const std::function<Vector(double)>& z_fn, double t,
                              double h_fd) {
    if (!(h_fd > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    const double hp = system.hamiltonian(z_fn(t + h_fd));
    const double hm = system.hamiltonian(z_fn(t - h_fd));
    const Vector eta = system.eta(z_fn(t));
    const double result =
        (hp - hm) / (2.0 * h_fd) + system.r_apply(eta).dot(eta) - system.b_apply(t, eta).dot(eta);
    if (!std::isfinite(result)) {
        throw DomainError("non-finite power balance at t=" + std::to_string(t));
    }
    return result;
}

}  // namespace phcpg

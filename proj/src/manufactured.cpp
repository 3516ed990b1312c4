#include "phcpg/manufactured.hpp"

#include <cmath>
#include <string>

namespace phcpg {

namespace {

double weighted_norm(const Vector& e, const std::optional<Matrix>& weight) {
    if (!weight) return e.norm();
    return std::sqrt(std::max(0.0, e.dot(*weight * e)));
}

}  // namespace

ManufacturedSystem::ManufacturedSystem(ManufacturedCase c) : case_(std::move(c)) {
    if (!case_.base || !case_.z_exact || !case_.dz_exact) {
        throw std::invalid_argument("manufactured case needs a base system and both trajectories");
    }
}

Vector ManufacturedSystem::b_apply(double t, const Vector&) const {
    const Vector e = case_.base->eta(case_.z_exact(t));
    return apply_mass(*case_.base, case_.dz_exact(t)) - case_.base->j_apply(e) + case_.base->r_apply(e);
}

Matrix ManufacturedSystem::b_jacobian(double, const Vector&) const { return Matrix::Zero(dim(), dim()); }

std::shared_ptr<const ManufacturedSystem> wrap_manufactured(ManufacturedCase c) {
    return std::make_shared<const ManufacturedSystem>(std::move(c));
}

Vector manufactured_defect(const PHSystem& system, const ManufacturedCase& c, double t) {
    const Vector e = system.eta(c.z_exact(t));
    return apply_mass(system, c.dz_exact(t)) - rhs(system, t, e);
}

ManufacturedCase toda_manufactured(const TodaParams& params) {
    const int n = params.N;
    ManufacturedCase c;
    c.base = make_toda(params, [](double) { return 0.0; });
    c.z_exact = [n](double t) {
        Vector z(2 * n);
        z.head(n).setConstant(std::sin(t));
        z.tail(n).setConstant(std::cos(t));
        return z;
    };
    c.dz_exact = [n](double t) {
        Vector z(2 * n);
        z.head(n).setConstant(std::cos(t));
        z.tail(n).setConstant(-std::sin(t));
        return z;
    };
    return c;
}

ManufacturedCase rigid_body_manufactured(const RigidBodyParams& params) {
    ManufacturedCase c;
    c.base = make_rigid_body(params, [](double) { return 0.0; });
    c.z_exact = [](double t) {
        const double ct = std::cos(t);
        return Vector{{std::sin(t), std::sin(2.0 * t) * ct * ct + 0.5, ct}};
    };
    c.dz_exact = [](double t) {
        const double ct = std::cos(t);
        const double s2 = std::sin(2.0 * t);
        return Vector{{ct, 2.0 * std::cos(2.0 * t) * ct * ct - s2 * s2, -std::sin(t)}};
    };
    return c;
}

ManufacturedCase damped_wave_manufactured(const WaveParams& params) {
    auto sys = make_damped_wave(params, [](double) { return 0.0; }, [](double) { return 0.0; });
    const Vector profile = sys->sample_state([](double x) { return std::sin(x); },
                                             [](double x) { return std::sin(x); });
    ManufacturedCase c;
    c.base = sys;
    c.z_exact = [profile](double t) -> Vector { return std::sin(t) * profile; };
    c.dz_exact = [profile](double t) -> Vector { return std::cos(t) * profile; };
    return c;
}

std::vector<double> sampling_grid(double t0, double t_end, double tau_ref) {
    if (!(tau_ref > 0.0)) throw std::invalid_argument("sampling step must be positive");
    if (!(t_end > t0)) throw std::invalid_argument("sampling interval is empty");
    const auto n = static_cast<long>(std::ceil((t_end - t0) / tau_ref - 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * tau_ref;
        if (t >= t_end) break;
        grid.push_back(t);
    }
    grid.push_back(t_end);
    return grid;
}

double linf_error(const CpgSolution& sol, const TrajectoryFn& z_exact, double tau_ref,
                  const std::optional<Matrix>& weight) {
    double worst = 0.0;
    for (double t : sampling_grid(sol.partition.start(), sol.partition.end(), tau_ref)) {
        worst = std::max(worst, weighted_norm(z_exact(t) - sol.eval(t), weight));
    }
    return worst;
}

double nodal_error(const CpgSolution& sol, const TrajectoryFn& z_exact, const std::optional<Matrix>& weight) {
    double worst = 0.0;
    for (double t : sol.partition.points()) worst = std::max(worst, weighted_norm(z_exact(t) - sol.eval(t), weight));
    return worst;
}

std::vector<Rate> eoc(const std::vector<double>& taus, const std::vector<double>& errors) {
    if (taus.size() != errors.size()) throw std::invalid_argument("eoc: taus and errors differ in length");
    if (taus.size() < 2) throw std::invalid_argument("eoc: need at least two rows");
    std::vector<Rate> out(taus.size());
    for (std::size_t i = 1; i < taus.size(); ++i) {
        if (!(taus[i] > 0.0) || !(taus[i - 1] > 0.0) || taus[i] == taus[i - 1]) {
            throw std::invalid_argument("eoc: step sizes must be positive and distinct");
        }
        if (!(errors[i] > 0.0) || !(errors[i - 1] > 0.0)) {
            out[i].status = Rate::Status::BelowFloor;
            continue;
        }
        out[i].status = Rate::Status::Value;
        out[i].value = std::log(errors[i - 1] / errors[i]) / std::log(taus[i - 1] / taus[i]);
    }
    return out;
}

}  // namespace phcpg

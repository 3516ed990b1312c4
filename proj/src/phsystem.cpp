#include "phcpg/phsystem.hpp"

#include <algorithm>
#include <cmath>

namespace phcpg {

const std::optional<Matrix> PHSystem::kNoMass = std::nullopt;

const std::optional<Matrix>& PHSystem::mass() const { return kNoMass; }

Matrix PHSystem::eta_jacobian(const Vector& z) const {
    return forward_difference_jacobian([this](const Vector& x) { return eta(x); }, z, eta(z));
}

Matrix PHSystem::jr_jacobian(const Vector& v) const {
    auto f = [this](const Vector& x) -> Vector { return j_apply(x) - r_apply(x); };
    return forward_difference_jacobian(f, v, f(v));
}

Matrix PHSystem::b_jacobian(double t, const Vector& v) const {
    auto f = [this, t](const Vector& x) { return b_apply(t, x); };
    return forward_difference_jacobian(f, v, f(v));
}

Vector rhs(const PHSystem& system, double t, const Vector& v) {
    return system.j_apply(v) - system.r_apply(v) + system.b_apply(t, v);
}

Matrix rhs_jacobian(const PHSystem& system, double t, const Vector& v) {
    return system.jr_jacobian(v) + system.b_jacobian(t, v);
}

Vector apply_mass(const PHSystem& system, const Vector& v) {
    const auto& m = system.mass();
    return m ? Vector(*m * v) : v;
}

double check_gradient(const PHSystem& system, const Vector& z, double h) {
    const Vector grad = apply_mass(system, system.eta(z));
    double worst = 0.0;
    Vector zp = z;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        zp[i] = z[i] + h;
        const double hp = system.hamiltonian(zp);
        zp[i] = z[i] - h;
        const double hm = system.hamiltonian(zp);
        zp[i] = z[i];
        if (!std::isfinite(hp) || !std::isfinite(hm)) {
            throw DomainError("non-finite Hamiltonian in gradient check at component " + std::to_string(i));
        }
        const double fd = (hp - hm) / (2.0 * h);
        const double scale = std::max(1.0, std::abs(grad[i]));
        worst = std::max(worst, std::abs(fd - grad[i]) / scale);
    }
    return worst;
}

double conservativity_defect(const PHSystem& system, const Vector& v) {
    return std::abs(system.j_apply(v).dot(v)) / (1.0 + v.squaredNorm());
}

double dissipation_form(const PHSystem& system, const Vector& v) { return system.r_apply(v).dot(v); }

bool mass_is_spd(const PHSystem& system) {
    const auto& m = system.mass();
    if (!m) return true;
    if (m->rows() != system.dim() || m->cols() != system.dim()) return false;
    const double scale = std::max(1.0, m->cwiseAbs().maxCoeff());
    if ((*m - m->transpose()).cwiseAbs().maxCoeff() > 1e-13 * scale) return false;
    Eigen::LLT<Matrix> llt(*m);
    return llt.info() == Eigen::Success;
}

}  // namespace phcpg

#include "phcpg/models.hpp"

#include "phcpg/quadrature.hpp"

#include <cmath>
#include <string>

namespace phcpg {

namespace {

void require_size(const Vector& v, int n, const char* what) {
    if (v.size() != n) {
        throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                                    std::to_string(v.size()));
    }
}

Matrix cross_matrix(const Eigen::Vector3d& x) {
    Matrix m(3, 3);
    m << 0.0, -x[2], x[1], x[2], 0.0, -x[0], -x[1], x[0], 0.0;
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Toda

TodaParams TodaParams::uniform(int N, double g) { return {N, std::vector<double>(std::max(N, 0), g)}; }

void TodaParams::validate() const {
    if (N < 1) throw std::invalid_argument("Toda lattice needs N >= 1");
    if (static_cast<int>(gamma.size()) != N) throw std::invalid_argument("Toda lattice needs N damping values");
    for (double g : gamma) {
        if (!(g >= 0.0)) throw std::invalid_argument("Toda damping must be nonnegative");
    }
}

TodaSystem::TodaSystem(TodaParams params, ScalarFn control)
    : params_(std::move(params)), control_(std::move(control)) {
    params_.validate();
    if (!control_) throw std::invalid_argument("Toda lattice needs a control function");
}

double TodaSystem::hamiltonian(const Vector& z) const {
    const int n = params_.N;
    require_size(z, dim(), "Toda state");
    const auto q = z.head(n);
    const auto p = z.tail(n);
    double h = 0.5 * p.squaredNorm();
    for (int k = 0; k + 1 < n; ++k) h += std::exp(q[k] - q[k + 1]);
    h += std::exp(q[n - 1]) - q[0] - n;
    return h;
}

Vector TodaSystem::eta(const Vector& z) const {
    const int n = params_.N;
    require_size(z, dim(), "Toda state");
    Vector out(dim());
    const auto q = z.head(n);
    for (int k = 0; k < n; ++k) {
        double g = 0.0;
        if (k + 1 < n) g += std::exp(q[k] - q[k + 1]);
        if (k > 0) g -= std::exp(q[k - 1] - q[k]);
        if (k == n - 1) g += std::exp(q[k]);
        if (k == 0) g -= 1.0;
        out[k] = g;
    }
    out.tail(n) = z.tail(n);
    return out;
}

Vector TodaSystem::j_apply(const Vector& v) const {
    const int n = params_.N;
    require_size(v, dim(), "Toda J argument");
    Vector out(dim());
    out.head(n) = v.tail(n);
    out.tail(n) = -v.head(n);
    return out;
}

Vector TodaSystem::r_apply(const Vector& v) const {
    const int n = params_.N;
    require_size(v, dim(), "Toda R argument");
    Vector out = Vector::Zero(dim());
    for (int k = 0; k < n; ++k) out[n + k] = params_.gamma[k] * v[n + k];
    return out;
}

Vector TodaSystem::b_apply(double t, const Vector& v) const {
    require_size(v, dim(), "Toda B argument");
    Vector out = Vector::Zero(dim());
    out[params_.N] = control_(t);
    return out;
}

Matrix TodaSystem::eta_jacobian(const Vector& z) const {
    const int n = params_.N;
    require_size(z, dim(), "Toda state");
    Matrix jac = Matrix::Zero(dim(), dim());
    for (int k = 0; k + 1 < n; ++k) {
        const double e = std::exp(z[k] - z[k + 1]);
        jac(k, k) += e;
        jac(k + 1, k + 1) += e;
        jac(k, k + 1) -= e;
        jac(k + 1, k) -= e;
    }
    jac(n - 1, n - 1) += std::exp(z[n - 1]);
    jac.bottomRightCorner(n, n).setIdentity();
    return jac;
}

Matrix TodaSystem::jr_jacobian(const Vector&) const {
    const int n = params_.N;
    Matrix jac = Matrix::Zero(dim(), dim());
    jac.topRightCorner(n, n).setIdentity();
    jac.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
    for (int k = 0; k < n; ++k) jac(n + k, n + k) = -params_.gamma[k];
    return jac;
}

Matrix TodaSystem::b_jacobian(double, const Vector&) const { return Matrix::Zero(dim(), dim()); }

std::shared_ptr<const TodaSystem> make_toda(TodaParams params, ScalarFn control) {
    return std::make_shared<const TodaSystem>(std::move(params), std::move(control));
}

// ---------------------------------------------------------------------------
// Rigid body

void RigidBodyParams::validate() const {
    for (double i : inertia) {
        if (!(i > 0.0) || !std::isfinite(i)) throw std::invalid_argument("moments of inertia must be positive");
    }
}

RigidBodySystem::RigidBodySystem(RigidBodyParams params, ScalarFn control)
    : params_(params), control_(std::move(control)) {
    params_.validate();
    if (!control_) throw std::invalid_argument("rigid body needs a control function");
}

double RigidBodySystem::hamiltonian(const Vector& z) const {
    require_size(z, 3, "rigid body state");
    double h = 0.0;
    for (int i = 0; i < 3; ++i) h += z[i] * z[i] / params_.inertia[i];
    return 0.5 * h;
}

Vector RigidBodySystem::eta(const Vector& z) const {
    require_size(z, 3, "rigid body state");
    Vector out(3);
    for (int i = 0; i < 3; ++i) out[i] = z[i] / params_.inertia[i];
    return out;
}

Vector RigidBodySystem::j_apply(const Vector& v) const {
    require_size(v, 3, "rigid body J argument");
    const Eigen::Vector3d z(params_.inertia[0] * v[0], params_.inertia[1] * v[1], params_.inertia[2] * v[2]);
    return z.cross(Eigen::Vector3d(v[0], v[1], v[2]));
}

Vector RigidBodySystem::r_apply(const Vector& v) const {
    require_size(v, 3, "rigid body R argument");
    return Vector::Zero(3);
}

Vector RigidBodySystem::b_apply(double t, const Vector& v) const {
    require_size(v, 3, "rigid body B argument");
    const double u = control_(t);
    return Vector{{params_.axis[0] * u, params_.axis[1] * u, params_.axis[2] * u}};
}

Matrix RigidBodySystem::eta_jacobian(const Vector&) const {
    Matrix jac = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) jac(i, i) = 1.0 / params_.inertia[i];
    return jac;
}

Matrix RigidBodySystem::jr_jacobian(const Vector& v) const {
    require_size(v, 3, "rigid body J argument");
    // d/dv [(I v) x v] = [I v]_x - [v]_x diag(I)
    const Eigen::Vector3d iv(params_.inertia[0] * v[0], params_.inertia[1] * v[1], params_.inertia[2] * v[2]);
    Matrix scale = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) scale(i, i) = params_.inertia[i];
    return cross_matrix(iv) - cross_matrix(Eigen::Vector3d(v[0], v[1], v[2])) * scale;
}

Matrix RigidBodySystem::b_jacobian(double, const Vector&) const { return Matrix::Zero(3, 3); }

std::shared_ptr<const RigidBodySystem> make_rigid_body(RigidBodyParams params, ScalarFn control) {
    return std::make_shared<const RigidBodySystem>(params, std::move(control));
}

// ---------------------------------------------------------------------------
// Damped wave

void WaveParams::validate() const {
    if (N < 1) throw std::invalid_argument("wave model needs N >= 1 interior points");
    if (!(ell > 0.0)) throw std::invalid_argument("wave domain length must be positive");
    if (!(gamma >= 0.0)) throw std::invalid_argument("wave friction must be nonnegative");
    if (!(nu >= 0.0)) throw std::invalid_argument("wave viscosity must be nonnegative");
    if (rf_quad_nodes < 1 || rf_quad_nodes > kMaxQuadratureNodes) {
        throw std::invalid_argument("friction quadrature node count out of range");
    }
}

DampedWaveSystem::DampedWaveSystem(WaveParams params, ScalarFn g0, ScalarFn g_ell)
    : params_(params), g0_(std::move(g0)), g_ell_(std::move(g_ell)) {
    params_.validate();
    if (!g0_ || !g_ell_) throw std::invalid_argument("wave model needs both boundary data functions");
    const int cells = params_.N + 1;
    const int nodes = params_.N + 2;
    const double h = params_.h();

    diff_ = Matrix::Zero(cells, nodes);
    p1_mass_ = Matrix::Zero(nodes, nodes);
    stiffness_ = Matrix::Zero(nodes, nodes);
    for (int c = 0; c < cells; ++c) {
        diff_(c, c) = -1.0;
        diff_(c, c + 1) = 1.0;
        // local 2x2 blocks
        p1_mass_(c, c) += 1.0 / 3.0;
        p1_mass_(c + 1, c + 1) += 1.0 / 3.0;
        p1_mass_(c, c + 1) += 1.0 / 6.0;
        p1_mass_(c + 1, c) += 1.0 / 6.0;
        stiffness_(c, c) += 1.0 / h;
        stiffness_(c + 1, c + 1) += 1.0 / h;
        stiffness_(c, c + 1) -= 1.0 / h;
        stiffness_(c + 1, c) -= 1.0 / h;
    }

    Matrix c_h = Matrix::Zero(dim(), dim());
    c_h.topLeftCorner(cells, cells) = h * Matrix::Identity(cells, cells);
    c_h.bottomRightCorner(nodes, nodes) = h * p1_mass_;
    mass_ = std::move(c_h);

    const QuadratureRule rule = gauss_legendre_unit(params_.rf_quad_nodes);
    cell_nodes_ = rule.nodes;
    cell_weights_ = rule.weights;
}

template <class Weight>
Matrix DampedWaveSystem::weighted_p1_mass(const Vector& v_nodes, Weight&& weight) const {
    const int nodes = params_.N + 2;
    require_size(v_nodes, nodes, "wave nodal velocity");
    const double h = params_.h();
    Matrix out = Matrix::Zero(nodes, nodes);
    for (int c = 0; c + 1 < nodes; ++c) {
        double m00 = 0.0, m01 = 0.0, m11 = 0.0;
        for (std::size_t q = 0; q < cell_nodes_.size(); ++q) {
            const double xi = cell_nodes_[q];
            const double left = 1.0 - xi;
            const double vh = v_nodes[c] * left + v_nodes[c + 1] * xi;
            const double w = cell_weights_[q] * weight(vh);
            m00 += w * left * left;
            m01 += w * left * xi;
            m11 += w * xi * xi;
        }
        out(c, c) += h * m00;
        out(c, c + 1) += h * m01;
        out(c + 1, c) += h * m01;
        out(c + 1, c + 1) += h * m11;
    }
    return out;
}

Matrix DampedWaveSystem::friction_matrix(const Vector& v_nodes) const {
    // psi(v) = (1+v^2)/sqrt(1+v^2), evaluated as sqrt(1+v^2)
    return weighted_p1_mass(v_nodes, [](double v) { return std::sqrt(1.0 + v * v); });
}

Matrix DampedWaveSystem::friction_tangent(const Vector& v_nodes) const {
    return weighted_p1_mass(v_nodes, [](double v) { return (1.0 + 2.0 * v * v) / std::sqrt(1.0 + v * v); });
}

double DampedWaveSystem::hamiltonian(const Vector& w) const {
    require_size(w, dim(), "wave state");
    const int cells = params_.N + 1;
    const double h = params_.h();
    const auto rho = w.head(cells);
    const auto v = w.tail(params_.N + 2);
    const double quartic = rho.array().pow(4).sum();
    return 0.5 * h * rho.squaredNorm() + 0.5 * h * v.dot(p1_mass_ * v) + 0.25 * h * quartic;
}

Vector DampedWaveSystem::eta(const Vector& w) const {
    require_size(w, dim(), "wave state");
    const int cells = params_.N + 1;
    Vector out = w;
    for (int c = 0; c < cells; ++c) out[c] = w[c] + w[c] * w[c] * w[c];
    return out;
}

Vector DampedWaveSystem::j_apply(const Vector& v) const {
    require_size(v, dim(), "wave J argument");
    const int cells = params_.N + 1;
    const int nodes = params_.N + 2;
    Vector out(dim());
    out.head(cells) = -diff_ * v.tail(nodes);
    out.tail(nodes) = diff_.transpose() * v.head(cells);
    return out;
}

Vector DampedWaveSystem::r_apply(const Vector& v) const {
    require_size(v, dim(), "wave R argument");
    const int cells = params_.N + 1;
    const int nodes = params_.N + 2;
    const Vector vn = v.tail(nodes);
    Vector out = Vector::Zero(dim());
    Vector block = params_.nu * (stiffness_ * vn);
    if (params_.gamma != 0.0) block += params_.gamma * (friction_matrix(vn) * vn);
    out.segment(cells, nodes) = block;
    return out;
}

Vector DampedWaveSystem::b_apply(double t, const Vector& v) const {
    require_size(v, dim(), "wave B argument");
    Vector out = Vector::Zero(dim());
    out[params_.N + 1] = g0_(t);
    out[dim() - 1] = -g_ell_(t);
    return out;
}

Matrix DampedWaveSystem::eta_jacobian(const Vector& w) const {
    require_size(w, dim(), "wave state");
    Matrix jac = Matrix::Identity(dim(), dim());
    for (int c = 0; c <= params_.N; ++c) jac(c, c) = 1.0 + 3.0 * w[c] * w[c];
    return jac;
}

Matrix DampedWaveSystem::jr_jacobian(const Vector& v) const {
    require_size(v, dim(), "wave J argument");
    const int cells = params_.N + 1;
    const int nodes = params_.N + 2;
    Matrix jac = Matrix::Zero(dim(), dim());
    jac.topRightCorner(cells, nodes) = -diff_;
    jac.bottomLeftCorner(nodes, cells) = diff_.transpose();
    Matrix damp = params_.nu * stiffness_;
    if (params_.gamma != 0.0) damp += params_.gamma * friction_tangent(v.tail(nodes));
    jac.bottomRightCorner(nodes, nodes) = -damp;
    return jac;
}

Matrix DampedWaveSystem::b_jacobian(double, const Vector&) const { return Matrix::Zero(dim(), dim()); }

std::vector<double> DampedWaveSystem::midpoints() const {
    std::vector<double> x(params_.N + 1);
    for (int c = 0; c <= params_.N; ++c) x[c] = (c + 0.5) * params_.h();
    return x;
}

std::vector<double> DampedWaveSystem::grid_points() const {
    std::vector<double> x(params_.N + 2);
    for (int n = 0; n <= params_.N + 1; ++n) x[n] = n * params_.h();
    x.back() = params_.ell;
    return x;
}

Vector DampedWaveSystem::sample_state(const ScalarFn& rho, const ScalarFn& v) const {
    Vector w(dim());
    const auto mids = midpoints();
    const auto grid = grid_points();
    for (std::size_t c = 0; c < mids.size(); ++c) w[static_cast<Eigen::Index>(c)] = rho(mids[c]);
    for (std::size_t n = 0; n < grid.size(); ++n) w[static_cast<Eigen::Index>(mids.size() + n)] = v(grid[n]);
    return w;
}

std::shared_ptr<const DampedWaveSystem> make_damped_wave(WaveParams params, ScalarFn g0, ScalarFn g_ell) {
    return std::make_shared<const DampedWaveSystem>(params, std::move(g0), std::move(g_ell));
}

}  // namespace phcpg

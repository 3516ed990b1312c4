#include "phcpg/models.hpp"
#include "phcpg/phsystem.hpp"

#include "support.hpp"

#include <cmath>
#include <limits>

using namespace phcpg;

namespace {

// H = sum z^4/4 with a diagonal mass; eta = M^{-1} z^3.
class QuarticSystem final : public PHSystem {
public:
    explicit QuarticSystem(bool wrong_gradient = false) : wrong_(wrong_gradient), mass_(Matrix{{2.0, 0.0}, {0.0, 3.0}}) {}
    [[nodiscard]] int dim() const override { return 2; }
    [[nodiscard]] double hamiltonian(const Vector& z) const override { return 0.25 * z.array().pow(4).sum(); }
    [[nodiscard]] Vector eta(const Vector& z) const override {
        Vector g = z.array().cube();
        if (wrong_) return g;
        return mass_->ldlt().solve(g);
    }
    [[nodiscard]] Vector j_apply(const Vector& v) const override { return Vector{{v[1], -v[0]}}; }
    [[nodiscard]] Vector r_apply(const Vector& v) const override { return Vector{{0.0, 0.5 * v[1]}}; }
    [[nodiscard]] Vector b_apply(double t, const Vector&) const override { return Vector{{std::cos(t), 0.0}}; }
    [[nodiscard]] const std::optional<Matrix>& mass() const override { return mass_; }

private:
    bool wrong_;
    std::optional<Matrix> mass_;
};

}  // namespace

TEST_CASE("gradient check accepts M eta = grad H and flags a wrong eta") {
    const QuarticSystem good;
    const QuarticSystem bad(true);
    const Vector z{{0.7, -1.3}};
    CHECK(check_gradient(good, z, 1e-5) < 1e-8);
    CHECK(check_gradient(bad, z, 1e-5) > 0.1);
}

TEST_CASE("gradient check rejects non-finite values") {
    const QuarticSystem sys;
    const Vector z{{std::numeric_limits<double>::quiet_NaN(), 1.0}};
    CHECK_THROWS_AS((void)check_gradient(sys, z, 1e-5), DomainError);
}

TEST_CASE("default local Jacobians are forward differences") {
    const QuarticSystem sys;
    const Vector z{{0.4, 1.1}};
    const Matrix expected = sys.mass()->inverse() * Matrix(Vector(3.0 * z.array().square()).asDiagonal());
    CHECK((sys.eta_jacobian(z) - expected).cwiseAbs().maxCoeff() < 1e-6);
    const Matrix jr{{0.0, 1.0}, {-1.0, -0.5}};
    CHECK((sys.jr_jacobian(z) - jr).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(sys.b_jacobian(0.3, z).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((rhs_jacobian(sys, 0.3, z) - jr).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("rhs, mass application and structural forms") {
    const QuarticSystem sys;
    const Vector v{{2.0, -1.0}};
    CHECK((rhs(sys, 0.0, v) - Vector{{0.0, -1.5}}).norm() < 1e-15);
    CHECK((apply_mass(sys, v) - Vector{{4.0, -3.0}}).norm() < 1e-15);
    CHECK(conservativity_defect(sys, v) < 1e-15);
    CHECK(dissipation_form(sys, v) == doctest::Approx(0.5));
    CHECK(mass_is_spd(sys));
    const test::LinearSystem lin = test::oscillator();
    CHECK((apply_mass(lin, v) - v).norm() == 0.0);
    CHECK(mass_is_spd(lin));
}

TEST_CASE("forward difference Jacobian of a smooth map") {
    const auto f = [](const Vector& x) { return Vector{{std::sin(x[0]) * x[1], x[0] * x[0]}}; };
    const Vector x{{0.3, 2.0}};
    const Matrix jac = forward_difference_jacobian(f, x, f(x));
    const Matrix exact{{std::cos(0.3) * 2.0, std::sin(0.3)}, {0.6, 0.0}};
    CHECK((jac - exact).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("indefinite or asymmetric mass matrices are detected") {
    struct Bad final : PHSystem {
        std::optional<Matrix> m;
        explicit Bad(Matrix mm) : m(std::move(mm)) {}
        int dim() const override { return 2; }
        double hamiltonian(const Vector& z) const override { return 0.5 * z.squaredNorm(); }
        Vector eta(const Vector& z) const override { return z; }
        Vector j_apply(const Vector& v) const override { return 0 * v; }
        Vector r_apply(const Vector& v) const override { return 0 * v; }
        Vector b_apply(double, const Vector& v) const override { return 0 * v; }
        const std::optional<Matrix>& mass() const override { return m; }
    };
    CHECK_FALSE(mass_is_spd(Bad(Matrix{{1.0, 0.0}, {0.0, -1.0}})));
    CHECK_FALSE(mass_is_spd(Bad(Matrix{{1.0, 0.1}, {0.0, 1.0}})));
    CHECK(mass_is_spd(Bad(Matrix{{2.0, 0.5}, {0.5, 1.0}})));
}

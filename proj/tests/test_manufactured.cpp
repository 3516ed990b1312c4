#include "phcpg/manufactured.hpp"

#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace phcpg;

TEST_CASE("manufactured trajectories satisfy their forced systems pointwise") {
    WaveParams nu1;
    nu1.nu = 1.0;
    const std::vector<ManufacturedCase> cases{
        toda_manufactured(TodaParams::uniform(5, 0.1)), rigid_body_manufactured({}),
        rigid_body_manufactured({{1.0, 2.0, 3.0}, {0.5, 1.0, -1.0}}), damped_wave_manufactured({}),
        damped_wave_manufactured(nu1)};
    for (const auto& mc : cases) {
        const auto sys = wrap_manufactured(mc);
        for (int i = 0; i < 50; ++i) {
            const double t = test::uniform(0.0, 5.0);
            CHECK(manufactured_defect(*sys, mc, t).lpNorm<Eigen::Infinity>() <= 1e-12);
        }
    }
}

TEST_CASE("analytic derivatives match central differences") {
    for (const auto& mc : {toda_manufactured(TodaParams::uniform(3, 0.1)), rigid_body_manufactured({}),
                           damped_wave_manufactured({})}) {
        for (double t : {0.3, 1.7, 4.2}) {
            const double h = 1e-5;
            const Vector fd = (mc.z_exact(t + h) - mc.z_exact(t - h)) / (2 * h);
            CHECK((fd - mc.dz_exact(t)).lpNorm<Eigen::Infinity>() <= 1e-8);
        }
    }
}

TEST_CASE("manufactured trajectories have the documented closed forms") {
    const auto toda = toda_manufactured(TodaParams::uniform(2, 0.1));
    CHECK((toda.z_exact(0.4) - Vector{{std::sin(0.4), std::sin(0.4), std::cos(0.4), std::cos(0.4)}}).norm() < 1e-15);
    const auto rb = rigid_body_manufactured({});
    const double t = 0.9;
    const Vector expected{{std::sin(t), std::sin(2 * t) * std::cos(t) * std::cos(t) + 0.5, std::cos(t)}};
    CHECK((rb.z_exact(t) - expected).norm() < 1e-15);
    const auto wave = damped_wave_manufactured({});
    const Vector w = wave.z_exact(t);
    const double h = 10.0 / 11.0;
    CHECK(w[0] == doctest::Approx(std::sin(t) * std::sin(0.5 * h)));
    CHECK(w[11] == doctest::Approx(0.0));
    CHECK(w[12] == doctest::Approx(std::sin(t) * std::sin(h)));
}

TEST_CASE("sampling grid always ends at the final time") {
    const auto g = sampling_grid(0.0, 1.0, 0.3);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK(sampling_grid(0.0, 1.0, 0.25).size() == 5);
}

TEST_CASE("errors of an exact polynomial solution vanish") {
    // z = t^2 solved by cPG with k = 2 on dz/dt = 2t.
    class Ramp final : public PHSystem {
    public:
        int dim() const override { return 1; }
        double hamiltonian(const Vector& z) const override { return 0.5 * z.squaredNorm(); }
        Vector eta(const Vector& z) const override { return z; }
        Vector j_apply(const Vector& v) const override { return 0 * v; }
        Vector r_apply(const Vector& v) const override { return 0 * v; }
        Vector b_apply(double t, const Vector&) const override { return Vector::Constant(1, 2 * t); }
    };
    SolverConfig c;
    c.k = 2;
    c.s_q = 2;
    c.s_pi = 2;
    const auto sol = integrate(Ramp{}, Vector::Zero(1), TimePartition::uniform(0.0, 1.0, 3), c);
    const TrajectoryFn exact = [](double t) { return Vector::Constant(1, t * t); };
    CHECK(linf_error(sol, exact, 1e-2) <= 1e-14);
    CHECK(nodal_error(sol, exact) <= 1e-14);
    const TrajectoryFn shifted = [](double t) { return Vector::Constant(1, t * t + 0.5); };
    CHECK(linf_error(sol, shifted, 1e-2) == doctest::Approx(0.5));
    CHECK(linf_error(sol, shifted, 1e-2, Matrix::Constant(1, 1, 4.0)) == doctest::Approx(1.0));
}

TEST_CASE("empirical orders of convergence") {
    const auto r = eoc({0.1, 0.05, 0.025}, {1e-2, 2.5e-3, 3.125e-4});
    REQUIRE(r.size() == 3);
    CHECK(r[0].status == Rate::Status::Undefined);
    CHECK(r[1].value == doctest::Approx(2.0));
    CHECK(r[2].value == doctest::Approx(3.0));
    const auto z = eoc({0.1, 0.05}, {1e-3, 0.0});
    CHECK(z[1].status == Rate::Status::BelowFloor);
    CHECK_FALSE(z[1].has_value());
    CHECK_THROWS((void)eoc({0.2}, {1.0}));
    CHECK_THROWS((void)eoc({0.1, 0.05}, {1.0}));
}

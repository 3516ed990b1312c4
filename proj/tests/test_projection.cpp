#include "phcpg/projection.hpp"

#include "support.hpp"

#include <cmath>

using namespace phcpg;

namespace {

Matrix sample(const SegmentPoly& p, const QuadratureRule& rule) {
    const auto t = map_nodes(rule, p.interval());
    Matrix out(p.dim(), rule.size());
    for (int l = 0; l < rule.size(); ++l) out.col(l) = p.eval(t[l]);
    return out;
}

// Polynomial of degree deg with random orthonormal coordinates.
SegmentPoly random_poly(const Interval& iv, int dim, int deg) {
    return {iv, test::random_vector(dim * (deg + 1)).reshaped(dim, deg + 1)};
}

}  // namespace

TEST_CASE("projection reproduces polynomials of the target degree") {
    const Interval iv{0.4, 0.65};
    for (int k = 0; k <= 6; ++k) {
        const SegmentPoly p = random_poly(iv, 3, k);
        const auto rule = gauss_legendre_unit(k + 1);
        const SegmentPoly q = project_sampled(iv, k, rule, sample(p, rule));
        CHECK((q.coeffs() - p.coeffs()).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("projection is idempotent") {
    const Interval iv{-1.0, 0.5};
    const auto rule = gauss_legendre_unit(5);
    Matrix f(2, rule.size());
    const auto t = map_nodes(rule, iv);
    for (int l = 0; l < rule.size(); ++l) f.col(l) << std::exp(t[l]), std::sin(3 * t[l]);
    const SegmentPoly once = project_sampled(iv, 3, rule, f);
    const SegmentPoly twice = project_sampled(iv, 3, rule, sample(once, rule));
    CHECK((once.coeffs() - twice.coeffs()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("projection error is orthogonal to the target space") {
    const Interval iv{0.0, 0.3};
    const int k = 3;
    const SegmentPoly p = random_poly(iv, 2, 2 * k);
    const auto rule = gauss_legendre_unit(2 * k + 1);
    const SegmentPoly q = project_sampled(iv, k, rule, sample(p, rule));
    const auto t = map_nodes(rule, iv);
    for (int j = 0; j <= k; ++j) {
        Vector acc = Vector::Zero(2);
        for (int l = 0; l < rule.size(); ++l) {
            const double lj = orthonormal_legendre_values(k, std::vector<double>{rule.nodes[l]})(j, 0);
            acc += rule.weights[l] * lj * (p.eval(t[l]) - q.eval(t[l]));
        }
        CHECK(acc.norm() < 1e-14);
    }
}

TEST_CASE("projection is L2 stable") {
    const Interval iv{0.0, 1.0};
    const auto fine = gauss_legendre_unit(30);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double a = test::uniform(0.5, 8.0);
        const double b = test::uniform(-1.0, 1.0);
        const auto f = [&](double t) { return Vector{{std::sin(a * t + b)}}; };
        for (int k = 0; k <= 5; ++k) {
            const auto rule = gauss_legendre_unit(k + 1);
            Matrix s(1, rule.size());
            const auto t = map_nodes(rule, iv);
            for (int l = 0; l < rule.size(); ++l) s(0, l) = f(t[l])[0];
            const SegmentPoly q = project_sampled(iv, k, rule, s);
            double nf = 0.0;
            double nq = 0.0;
            for (int l = 0; l < fine.size(); ++l) {
                nf += fine.weights[l] * f(fine.nodes[l]).squaredNorm();
                nq += fine.weights[l] * q.eval(fine.nodes[l]).squaredNorm();
            }
            worst = std::max(worst, std::sqrt(nq / nf));
        }
    }
    CHECK(worst <= 10.0);
}

TEST_CASE("cubic of a degree-k trajectory is projected exactly with 2k nodes") {
    const Interval iv{1.0, 1.2};
    for (int k = 1; k <= 5; ++k) {
        const SegmentPoly z = random_poly(iv, 4, k);
        auto cube = [&](const QuadratureRule& rule) {
            Matrix s = sample(z, rule);
            return project_sampled(iv, k - 1, rule, s.array().cube().matrix());
        };
        const SegmentPoly a = cube(gauss_legendre_unit(2 * k));
        const SegmentPoly b = cube(gauss_legendre_unit(2 * k + 5));
        CHECK((a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + b.coeffs().cwiseAbs().maxCoeff()));
        const SegmentPoly c = cube(gauss_legendre_unit(std::max(1, 2 * k - 1)));
        CHECK((c.coeffs() - b.coeffs()).cwiseAbs().maxCoeff() > 1e-10);
    }
}

TEST_CASE("eta projection of a segment uses the degree below") {
    const test::LinearSystem sys = test::oscillator();
    const Interval iv{0.0, 0.5};
    const SegmentPoly z = random_poly(iv, 2, 3);
    const SegmentPoly v = project_eta_of_segment(z, sys, gauss_legendre_unit(3));
    CHECK(v.degree() == 2);
    CHECK((v.coeffs() - z.coeffs().leftCols(3)).cwiseAbs().maxCoeff() < 1e-14);
}

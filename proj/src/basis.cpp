#include "phcpg/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace phcpg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_unit(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("basis point " + std::to_string(x) + " outside [0, 1]");
    }
}

// Unnormalized Legendre P_0..P_n at y in [-1,1] written into out[0..n].
void legendre_column(int n, double y, double* out) {
    out[0] = 1.0;
    if (n == 0) return;
    out[1] = y;
    for (int j = 1; j < n; ++j) {
        out[j + 1] = ((2.0 * j + 1.0) * y * out[j] - j * out[j - 1]) / (j + 1.0);
    }
}

}  // namespace

Matrix orthonormal_legendre_values(int k, std::span<const double> points) {
    if (k < 0) throw std::invalid_argument("negative polynomial degree");
    Matrix out(k + 1, static_cast<Eigen::Index>(points.size()));
    for (std::size_t l = 0; l < points.size(); ++l) {
        check_unit(points[l]);
        double* col = out.col(static_cast<Eigen::Index>(l)).data();
        legendre_column(k, 2.0 * points[l] - 1.0, col);
        for (int j = 0; j <= k; ++j) col[j] *= std::sqrt(2.0 * j + 1.0);
    }
    return out;
}

Matrix orthonormal_legendre_integrals(int k, std::span<const double> points) {
    if (k < 1) throw std::invalid_argument("antiderivative table needs k >= 1");
    Matrix out(k, static_cast<Eigen::Index>(points.size()));
    std::vector<double> p(static_cast<std::size_t>(k) + 1);
    for (std::size_t l = 0; l < points.size(); ++l) {
        check_unit(points[l]);
        const double x = points[l];
        legendre_column(k, 2.0 * x - 1.0, p.data());
        const auto c = static_cast<Eigen::Index>(l);
        out(0, c) = x;
        // int_{-1}^y P_j = (P_{j+1} - P_{j-1}) / (2j+1), and dx = dy/2.
        for (int j = 1; j < k; ++j) {
            out(j, c) = 0.5 * std::sqrt(2.0 * j + 1.0) * (p[j + 1] - p[j - 1]) / (2.0 * j + 1.0);
        }
    }
    return out;
}

Matrix unit_derivative_matrix(int k) {
    // Lhat_n' = 2 sqrt(2n+1) sum_{m<n, n-m odd} sqrt(2m+1) Lhat_m.
    Matrix d = Matrix::Zero(std::max(k, 1), k + 1);
    for (int n = 1; n <= k; ++n) {
        for (int m = n - 1; m >= 0; m -= 2) {
            d(m, n) = 2.0 * std::sqrt((2.0 * n + 1.0) * (2.0 * m + 1.0));
        }
    }
    return d;
}

Matrix unit_antiderivative_matrix(int k) {
    // int_0^x Lhat_0 = x = (Lhat_0 + Lhat_1/sqrt3)/2,
    // int_0^x Lhat_n = (Lhat_{n+1}/sqrt(2n+3) - Lhat_{n-1}/sqrt(2n-1)) / (2 sqrt(2n+1)).
    Matrix a = Matrix::Zero(k + 1, k);
    if (k == 0) return a;
    a(0, 0) = 0.5;
    a(1, 0) = 0.5 / std::sqrt(3.0);
    for (int n = 1; n < k; ++n) {
        const double s = 0.5 / std::sqrt(2.0 * n + 1.0);
        a(n + 1, n) = s / std::sqrt(2.0 * n + 3.0);
        a(n - 1, n) = -s / std::sqrt(2.0 * n - 1.0);
    }
    return a;
}

SegmentPoly::SegmentPoly(Interval interval, Matrix coeffs)
    : interval_(interval), coeffs_(std::move(coeffs)) {
    require_valid(interval_);
    if (coeffs_.cols() < 1 || coeffs_.rows() < 1) {
        throw std::invalid_argument("segment polynomial needs at least one coefficient column and row");
    }
}

SegmentPoly SegmentPoly::zero(Interval interval, int dim, int degree) {
    return SegmentPoly(interval, Matrix::Zero(dim, degree + 1));
}

SegmentPoly SegmentPoly::constant(Interval interval, const Vector& c) {
    Matrix coeffs(c.size(), 1);
    coeffs.col(0) = c * std::sqrt(interval.width());
    return SegmentPoly(interval, std::move(coeffs));
}

double SegmentPoly::to_unit(double t) const {
    const double w = interval_.width();
    const double slack = 4.0 * kEps * w;
    if (!(t >= interval_.a - slack && t <= interval_.b + slack)) {
        throw std::out_of_range("time " + std::to_string(t) + " outside segment [" +
                                std::to_string(interval_.a) + ", " + std::to_string(interval_.b) + "]");
    }
    return std::clamp((t - interval_.a) / w, 0.0, 1.0);
}

Vector SegmentPoly::eval(double t) const {
    const double x = to_unit(t);
    const int k = degree();
    Vector basis(k + 1);
    legendre_column(k, 2.0 * x - 1.0, basis.data());
    for (int j = 0; j <= k; ++j) basis[j] *= std::sqrt(2.0 * j + 1.0);
    return coeffs_ * basis / std::sqrt(interval_.width());
}

Vector SegmentPoly::eval_left() const { return eval(interval_.a); }
Vector SegmentPoly::eval_right() const { return eval(interval_.b); }

SegmentPoly SegmentPoly::derivative() const {
    const int k = degree();
    if (k == 0) return zero(interval_, dim(), 0);
    // L_n'(t) = tau^{-1} * (unit derivative expressed in L_m), same tau^{-1/2} scaling.
    Matrix d = coeffs_ * unit_derivative_matrix(k).transpose() / interval_.width();
    return SegmentPoly(interval_, std::move(d));
}

SegmentPoly SegmentPoly::antiderivative_from_left(const SegmentPoly& derivative, const Vector& z_left) {
    if (z_left.size() != derivative.dim()) {
        throw std::invalid_argument("antiderivative: dimension mismatch between derivative and left value");
    }
    const int k = derivative.degree() + 1;
    const double tau = derivative.interval().width();
    // int_a^t L_n = tau * sum_m A(m,n) L_m; the constant z_left is sqrt(tau) L_0.
    Matrix coeffs = tau * derivative.coeffs() * unit_antiderivative_matrix(k).transpose();
    coeffs.col(0) += std::sqrt(tau) * z_left;
    return SegmentPoly(derivative.interval(), std::move(coeffs));
}

}  // namespace phcpg

#pragma once

#include "phcpg/types.hpp"

#include <span>

namespace phcpg {

/// Values of the L2([0,1])-orthonormal shifted Legendre polynomials
/// Lhat_0..Lhat_k at the given points; entry (j, l) = Lhat_j(points[l]).
///
/// Lhat_j(x) = sqrt(2j+1) P_j(2x-1). Points must lie in [0, 1].
[[nodiscard]] Matrix orthonormal_legendre_values(int k, std::span<const double> points);

/// Values of the antiderivatives x -> int_0^x Lhat_j for j = 0..k-1 at the
/// given points; entry (j, l). Exact, via the Legendre integral identity.
[[nodiscard]] Matrix orthonormal_legendre_integrals(int k, std::span<const double> points);

/// A vector-valued polynomial on one time interval.
///
/// Column j of coeffs multiplies L_j(t) = tau^{-1/2} Lhat_j((t-a)/tau), so the
/// columns are L2(a,b)-orthonormal coordinates.
class SegmentPoly {
public:
    SegmentPoly(Interval interval, Matrix coeffs);

    /// Zero polynomial of the given degree and dimension.
    static SegmentPoly zero(Interval interval, int dim, int degree);
    /// Constant polynomial with value c.
    static SegmentPoly constant(Interval interval, const Vector& c);

    /// The unique degree-(k) polynomial q with q' = derivative and q(a) = z_left,
    /// where derivative has degree k-1.
    static SegmentPoly antiderivative_from_left(const SegmentPoly& derivative, const Vector& z_left);

    [[nodiscard]] const Interval& interval() const noexcept { return interval_; }
    [[nodiscard]] const Matrix& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.cols()) - 1; }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(coeffs_.rows()); }

    /// Value at t; t must lie in the interval up to 4 eps * width.
    [[nodiscard]] Vector eval(double t) const;
    [[nodiscard]] Vector eval_left() const;
    [[nodiscard]] Vector eval_right() const;

    /// Exact derivative, of degree max(k-1, 0).
    [[nodiscard]] SegmentPoly derivative() const;

    /// Maps t to the unit coordinate (t-a)/tau, clamped to [0,1] after the
    /// membership check.
    [[nodiscard]] double to_unit(double t) const;

private:
    Interval interval_;
    Matrix coeffs_;
};

/// Coefficient map of the derivative on the unit interval: row m, column n holds
/// the Lhat_m coordinate of Lhat_n'. Shape max(k,1) x (k+1).
[[nodiscard]] Matrix unit_derivative_matrix(int k);

/// Coefficient map of the antiderivative from 0 on the unit interval: column n
/// holds the Lhat coordinates (length k+1) of int_0^x Lhat_n, n = 0..k-1.
[[nodiscard]] Matrix unit_antiderivative_matrix(int k);

}  // namespace phcpg

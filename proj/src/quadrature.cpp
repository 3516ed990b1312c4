#include "phcpg/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace phcpg {

void require_valid(const Interval& interval) {
    if (!std::isfinite(interval.a) || !std::isfinite(interval.b) || !(interval.b > interval.a)) {
        throw std::invalid_argument("degenerate interval [" + std::to_string(interval.a) + ", " +
                                    std::to_string(interval.b) + "]");
    }
}

namespace {

// Legendre P_s and its derivative at x in [-1, 1].
std::pair<double, double> legendre_with_derivative(int s, double x) {
    double p_prev = 1.0;
    double p = x;
    for (int n = 1; n < s; ++n) {
        const double p_next = ((2.0 * n + 1.0) * x * p - n * p_prev) / (n + 1.0);
        p_prev = p;
        p = p_next;
    }
    // P_s'(x) = s (x P_s - P_{s-1}) / (x^2 - 1); x never hits +-1 for interior roots.
    const double dp = s * (x * p - p_prev) / (x * x - 1.0);
    return {p, dp};
}

}  // namespace

QuadratureRule gauss_legendre_unit(int s) {
    if (s < 1 || s > kMaxQuadratureNodes) {
        throw std::invalid_argument("Gauss-Legendre node count must lie in [1, " +
                                    std::to_string(kMaxQuadratureNodes) + "], got " +
                                    std::to_string(s));
    }
    QuadratureRule rule;
    rule.nodes.assign(s, 0.5);
    rule.weights.assign(s, 1.0);
    if (s == 1) return rule;

    // Roots on [-1,1] come in +-x pairs; compute the positive half and mirror so
    // the unit-interval rule is symmetric about 1/2 to the last bit.
    const int half = s / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (s + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            auto [p, d] = legendre_with_derivative(s, x);
            dp = d;
            const double dx = p / d;
            x -= dx;
            if (std::abs(dx) <= 1e-16) break;
        }
        dp = legendre_with_derivative(s, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is descending in i, so (1-x)/2 ascends.
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[s - 1 - i] = 1.0 - rule.nodes[i];
        rule.weights[i] = 0.5 * w;
        rule.weights[s - 1 - i] = 0.5 * w;
    }
    if (s % 2 == 1) {
        const double dp = legendre_with_derivative(s, 0.0).second;
        rule.nodes[half] = 0.5;
        rule.weights[half] = 1.0 / (dp * dp);
    }
    return rule;
}

std::vector<double> map_nodes(const QuadratureRule& rule, const Interval& interval) {
    require_valid(interval);
    std::vector<double> out(rule.nodes.size());
    const double w = interval.width();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = interval.a + w * rule.nodes[j];
    return out;
}

double apply(const QuadratureRule& rule, const Interval& interval, std::span<const double> samples) {
    require_valid(interval);
    if (samples.size() != rule.nodes.size()) {
        throw std::invalid_argument("quadrature expects " + std::to_string(rule.nodes.size()) +
                                    " samples, got " + std::to_string(samples.size()));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) sum += rule.weights[j] * samples[j];
    return interval.width() * sum;
}

}  // namespace phcpg

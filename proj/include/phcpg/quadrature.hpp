#pragma once

#include "phcpg/types.hpp"

#include <span>
#include <vector>

namespace phcpg {

/// s-point Gauss-Legendre rule on the unit interval [0, 1].
///
/// Nodes are strictly increasing and symmetric about 1/2, weights are
/// positive and sum to one. The rule integrates polynomials up to degree
/// 2s-1 exactly.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(nodes.size()); }
};

inline constexpr int kMaxQuadratureNodes = 64;

/// Builds the s-point Gauss-Legendre rule on [0, 1], 1 <= s <= 64.
[[nodiscard]] QuadratureRule gauss_legendre_unit(int s);

/// Affine image a + (b-a)*node of each unit node.
[[nodiscard]] std::vector<double> map_nodes(const QuadratureRule& rule, const Interval& interval);

/// (b-a) * sum_j weight_j * samples_j, samples taken at map_nodes(rule, interval).
[[nodiscard]] double apply(const QuadratureRule& rule, const Interval& interval,
                           std::span<const double> samples);

}  // namespace phcpg

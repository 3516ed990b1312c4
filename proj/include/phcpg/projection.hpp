#pragma once

#include "phcpg/basis.hpp"
#include "phcpg/phsystem.hpp"
#include "phcpg/quadrature.hpp"

namespace phcpg {

/// Quadrature-approximated local L2 projection onto polynomials of
/// target_degree on one interval. Column l of samples is f at the l-th
/// mapped node of rule. Exact whenever deg(f) + target_degree <= 2s-1.
[[nodiscard]] SegmentPoly project_sampled(const Interval& interval, int target_degree,
                                          const QuadratureRule& rule, const Matrix& samples);

/// Projection of eta(z_seg) onto degree deg(z_seg)-1, with eta sampled at the
/// nodes of rule_pi mapped to z_seg's interval.
[[nodiscard]] SegmentPoly project_eta_of_segment(const SegmentPoly& z_seg, const PHSystem& system,
                                                 const QuadratureRule& rule_pi);

}  // namespace phcpg

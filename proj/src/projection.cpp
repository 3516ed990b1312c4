#include "phcpg/projection.hpp"

#include <cmath>
#include <string>

namespace phcpg {

SegmentPoly project_sampled(const Interval& interval, int target_degree, const QuadratureRule& rule,
                            const Matrix& samples) {
    require_valid(interval);
    if (target_degree < 0) throw std::invalid_argument("projection target degree must be >= 0");
    if (samples.cols() != rule.size()) {
        throw std::invalid_argument("projection expects " + std::to_string(rule.size()) +
                                    " sample columns, got " + std::to_string(samples.cols()));
    }
    const Matrix basis = orthonormal_legendre_values(target_degree, rule.nodes);
    const Eigen::Map<const Vector> w(rule.weights.data(), rule.size());
    // c_j = tau sum_l w_l f_l L_j(zeta_l) = sqrt(tau) sum_l w_l f_l Lhat_j(node_l)
    Matrix coeffs = std::sqrt(interval.width()) * samples * w.asDiagonal() * basis.transpose();
    return SegmentPoly(interval, std::move(coeffs));
}

SegmentPoly project_eta_of_segment(const SegmentPoly& z_seg, const PHSystem& system,
                                   const QuadratureRule& rule_pi) {
    if (z_seg.degree() < 1) throw std::invalid_argument("projected segment needs degree >= 1");
    const auto times = map_nodes(rule_pi, z_seg.interval());
    Matrix samples(z_seg.dim(), rule_pi.size());
    for (int l = 0; l < rule_pi.size(); ++l) {
        samples.col(l) = system.eta(z_seg.eval(times[l]));
        if (!samples.col(l).allFinite()) {
            throw DomainError("eta not finite at projection node t=" + std::to_string(times[l]));
        }
    }
    return project_sampled(z_seg.interval(), z_seg.degree() - 1, rule_pi, samples);
}

}  // namespace phcpg

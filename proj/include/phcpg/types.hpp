#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace phcpg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Closed time interval [a, b] with b > a.
struct Interval {
    double a = 0.0;
    double b = 1.0;

    [[nodiscard]] double width() const noexcept { return b - a; }
};

/// Throws std::invalid_argument unless b > a and both ends are finite.
void require_valid(const Interval& interval);

/// A system map (H, eta, B, ...) was evaluated outside its domain or
/// produced a non-finite value.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace phcpg

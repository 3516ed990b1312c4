#pragma once

#include <cmath>
#include <limits>

namespace phcpg {

template <class F>
Matrix forward_difference_jacobian(F&& f, const Vector& x, const Vector& fx) {
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    Matrix jac(fx.size(), x.size());
    Vector xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = root_eps * (1.0 + std::abs(x[i]));
        xp[i] = x[i] + h;
        const double step = xp[i] - x[i];
        jac.col(i) = (f(xp) - fx) / step;
        xp[i] = x[i];
    }
    return jac;
}

}  // namespace phcpg

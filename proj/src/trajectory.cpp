#include "ucfas/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace ucfas {

void SpiralSpec::validate() const {
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw std::invalid_argument("trajectory.radius must be >= 0");
    if (!std::isfinite(omega) || !std::isfinite(climb_rate) || !std::isfinite(yaw_amplitude) ||
        !std::isfinite(yaw_rate) || !center.allFinite()) {
        throw std::invalid_argument("trajectory parameters must be finite");
    }
}

ReferenceSample spiral_reference(double t, const SpiralSpec& spec) {
    ReferenceSample ref;
    const double c = std::cos(spec.omega * t), s = std::sin(spec.omega * t);
    // k-th derivative of (cos, sin)(wt) is w^k times a quarter-turn rotation.
    const Eigen::Vector2d base(c, s);
    const Eigen::Vector2d quarter(-s, c);
    double wk = 1.0;
    for (int k = 0; k < 5; ++k) {
        const Eigen::Vector2d dir = (k % 2 == 0) ? base : quarter;
        const double sign = (k % 4 < 2) ? 1.0 : -1.0;
        ref.lateral[k] = spec.radius * wk * sign * dir;
        wk *= spec.omega;
    }
    ref.lateral[0] += spec.center.head<2>();

    ref.z = {spec.center(2) + spec.climb_rate * t, spec.climb_rate, 0.0, 0.0, 0.0};

    const double a = spec.yaw_amplitude, w = spec.yaw_rate;
    ref.psi = {a * std::sin(w * t), a * w * std::cos(w * t), -a * w * w * std::sin(w * t)};
    return ref;
}

ReferenceSample constant_reference(double z, double psi, const Eigen::Vector2d& lateral) {
    ReferenceSample ref;
    ref.z[0] = z;
    ref.psi[0] = psi;
    ref.lateral[0] = lateral;
    return ref;
}

}  // namespace ucfas

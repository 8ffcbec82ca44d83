#pragma once

#include <functional>

#include <Eigen/Dense>

#include "ucfas/types.hpp"

namespace ucfas {

/// Circle in the horizontal plane with a constant climb, plus a sinusoidal
/// yaw wave:
///   X*(t)   = center_xy + radius (cos wt, sin wt)
///   z*(t)   = center_z + climb_rate t
///   psi*(t) = yaw_amplitude sin(yaw_rate t)
struct SpiralSpec {
    double radius = 1.0;          // m
    double omega = 0.2;           // rad/s
    double climb_rate = 0.05;     // m/s
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double yaw_amplitude = 0.3;   // rad
    double yaw_rate = 0.1;        // rad/s

    void validate() const;
};

[[nodiscard]] ReferenceSample spiral_reference(double t, const SpiralSpec& spec);

/// Time-independent setpoint; every derivative of order >= 1 is zero.
[[nodiscard]] ReferenceSample constant_reference(double z, double psi, const Eigen::Vector2d& lateral);

using ReferenceGenerator = std::function<ReferenceSample(double)>;

}  // namespace ucfas

#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "ucfas/types.hpp"

namespace ucfas::test {

inline constexpr double kPi = std::numbers::pi;

// Roll and pitch drawn from (-pi/2 + margin, pi/2 - margin), yaw from (-pi, pi).
inline Eigen::Vector3d random_angles(std::mt19937_64& rng, double margin = 0.1) {
    std::uniform_real_distribution<double> tilt(-kPi / 2 + margin, kPi / 2 - margin);
    std::uniform_real_distribution<double> yaw(-kPi, kPi);
    return {tilt(rng), tilt(rng), yaw(rng)};
}

inline Eigen::Vector3d random_vector(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

inline PlantState random_state(std::mt19937_64& rng, double margin = 0.1) {
    const Eigen::Vector3d pos = random_vector(rng, 5.0);
    const Eigen::Vector3d vel = random_vector(rng, 2.0);
    const Eigen::Vector3d att = random_angles(rng, margin);
    const Eigen::Vector3d rates = random_vector(rng, 1.0);
    return {pos(0), pos(1), pos(2), vel(0), vel(1), vel(2), att(0), att(1), att(2), rates(0), rates(1), rates(2)};
}

}  // namespace ucfas::test

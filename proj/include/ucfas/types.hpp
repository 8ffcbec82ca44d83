#pragma once

#include <array>

#include <Eigen/Dense>

namespace ucfas {

using Vector12d = Eigen::Matrix<double, 12, 1>;

/// Physical constants of the airframe. Defaults are the simulated vehicle.
struct QuadrotorParams {
    double mass = 0.625;      // kg
    double gravity = 9.8;     // m/s^2
    double jx = 0.0019005;    // kg m^2
    double jy = 0.0019536;
    double jz = 0.0036894;

    /// Throws std::invalid_argument naming the first non-positive field.
    void validate() const;
};

/// Rigid-body state: position, inertial velocity, roll/pitch/yaw, body rates.
struct PlantState {
    double x = 0, y = 0, z = 0;
    double vx = 0, vy = 0, vz = 0;
    double phi = 0, theta = 0, psi = 0;
    double p = 0, q = 0, r = 0;

    [[nodiscard]] Vector12d to_vector() const;
    static PlantState from_vector(const Vector12d& v);

    [[nodiscard]] Eigen::Vector3d attitude() const { return {phi, theta, psi}; }
    [[nodiscard]] Eigen::Vector3d body_rates() const { return {p, q, r}; }
    [[nodiscard]] Eigen::Vector3d position() const { return {x, y, z}; }
    [[nodiscard]] Eigen::Vector3d velocity() const { return {vx, vy, vz}; }

    bool operator==(const PlantState&) const = default;
};

/// Actuator-level command: total thrust [N] and body torques [N m].
struct PhysicalInput {
    double thrust = 0;
    double tau_phi = 0;
    double tau_theta = 0;
    double tau_psi = 0;

    bool operator==(const PhysicalInput&) const = default;
};

/// Thrust input u0 with its first two time derivatives.
struct ThrustChain {
    double u0 = 0;
    double u0_dot = 0;
    double u0_ddot = 0;
};

/// Transformed inputs in which the model is fully actuated.
/// u1 drives yaw acceleration, u2 drives roll/pitch acceleration.
struct VirtualInputs {
    ThrustChain thrust;
    double u1 = 0;
    Eigen::Vector2d u2 = Eigen::Vector2d::Zero();

    /// The angular-acceleration vector [u2(0), u2(1), u1].
    [[nodiscard]] Eigen::Vector3d angular() const { return {u2(0), u2(1), u1}; }
};

/// Reference signals with analytic derivatives: z* and X* = [x* y*] up to
/// order 4, psi* up to order 2. Index k holds the k-th derivative.
struct ReferenceSample {
    std::array<double, 5> z{};
    std::array<double, 3> psi{};
    std::array<Eigen::Vector2d, 5> lateral{
        Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
        Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
};

}  // namespace ucfas

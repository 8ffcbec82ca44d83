#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "ucfas/types.hpp"

// Exact model transformation of the quadrotor into three fully actuated
// subsystems:
//   z''    = u0 - g
//   psi''  = u1
//   X''''  = g_X(Phi, Phi', u0, u0', u0'', u1) + G_X(Phi, u0) u2,   X = [x y]
// with u0 = (T/m) cos(phi) cos(theta) and Phi'' = [u2; u1].
//
// Angle arguments are Eigen::Vector3d ordered [phi, theta, psi]; angle rates
// are the Euler-angle derivatives, not body rates.

namespace ucfas {

/// Euler-rate matrix M(phi, theta), Phi' = M * [p q r]^T.
[[nodiscard]] Eigen::Matrix3d euler_matrix(double phi, double theta);

/// Closed-form inverse of M; M^-1 = [[1, 0, s_th], [0, c_phi, -s_phi c_th], [0, s_phi, c_phi c_th]].
[[nodiscard]] Eigen::Matrix3d euler_matrix_inverse(double phi, double theta);

/// Time derivative of M along (phi', theta').
[[nodiscard]] Eigen::Matrix3d euler_matrix_dot(double phi, double theta, double phi_dot, double theta_dot);

/// Normalised horizontal thrust direction: x'' = u0 f_x, y'' = u0 f_y.
struct ThrustDirection {
    double fx = 0;
    double fy = 0;
};

[[nodiscard]] ThrustDirection thrust_direction(const Eigen::Vector3d& angles);

/// Partial-derivative rows of f_x and f_y with respect to (phi, theta, psi).
struct GammaPair {
    Eigen::RowVector3d x = Eigen::RowVector3d::Zero();
    Eigen::RowVector3d y = Eigen::RowVector3d::Zero();
};

/// Gamma rows together with their time derivatives.
struct GammaRows {
    GammaPair value;
    GammaPair rate;
};

[[nodiscard]] GammaPair gamma(const Eigen::Vector3d& angles);
[[nodiscard]] GammaPair gamma_dot(const Eigen::Vector3d& angles, const Eigen::Vector3d& angle_rates);
[[nodiscard]] GammaRows gamma_rows(const Eigen::Vector3d& angles, const Eigen::Vector3d& angle_rates);

/// Drift term of the lateral fourth-order dynamics.
[[nodiscard]] Eigen::Vector2d lateral_drift(const Eigen::Vector3d& angles, const Eigen::Vector3d& angle_rates,
                                            const ThrustChain& thrust, double u1);

/// Determinant tolerance below which G_X is treated as singular.
inline constexpr double kInputMatrixDetTolerance = 1e-9;

struct LateralInputMatrix {
    Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
    double det_cofactor = 0;     // a d - b c of `matrix`
    double det_closed_form = 0;  // u0^2 / (cos^3 theta cos^2 phi)
};

/// G_X = u0 [[Gx1, Gx2], [Gy1, Gy2]] with both determinant routes, no
/// singularity check.
[[nodiscard]] LateralInputMatrix lateral_input_matrix_unchecked(const Eigen::Vector3d& angles, double u0);

/// As above; throws NearSingularInputError when |det| < kInputMatrixDetTolerance.
[[nodiscard]] LateralInputMatrix lateral_input_matrix(const Eigen::Vector3d& angles, double u0);

/// Closed-form determinant of G_X.
[[nodiscard]] double lateral_input_det(const Eigen::Vector3d& angles, double u0);

/// Fourth derivative of X implied by the model for a given u2.
[[nodiscard]] Eigen::Vector2d lateral_fourth_derivative(const Eigen::Vector3d& angles,
                                                         const Eigen::Vector3d& angle_rates,
                                                         const ThrustChain& thrust, double u1,
                                                         const Eigen::Vector2d& u2);

/// Inertial-coupling term [(Jy-Jz)/Jx qr, (Jz-Jx)/Jy pr, (Jx-Jy)/Jz pq].
[[nodiscard]] Eigen::Vector3d gyroscopic_term(const Eigen::Vector3d& body_rates, const QuadrotorParams& params);

/// Maps virtual inputs (u0, u1, u2) back to thrust and torques at `state`.
/// Only the u0 entry of the thrust chain is used.
[[nodiscard]] PhysicalInput virtual_to_physical(const VirtualInputs& virt, const PlantState& state,
                                                const QuadrotorParams& params);

struct VirtualPair {
    double u0 = 0;
    Eigen::Vector3d u_bar = Eigen::Vector3d::Zero();  // Phi'' = [u2(0), u2(1), u1]
};

[[nodiscard]] VirtualPair physical_to_virtual(const PhysicalInput& input, const PlantState& state,
                                              const QuadrotorParams& params);

/// Bounds on a scalar signal.
struct Box {
    double lower = 0;
    double upper = 0;

    [[nodiscard]] bool contains(double v) const { return lower <= v && v <= upper; }
    /// Signed distance to the nearest edge, negative outside.
    [[nodiscard]] double margin(double v) const { return std::min(v - lower, upper - v); }
};

enum ConstraintFlag : std::uint32_t {
    kViolU0 = 1u << 0,
    kViolU0Dot = 1u << 1,
    kViolU0Ddot = 1u << 2,
    kViolU1 = 1u << 3,
    kViolU2First = 1u << 4,
    kViolU2Second = 1u << 5,
};

/// Name used in reports for a single constraint flag.
[[nodiscard]] std::string constraint_name(ConstraintFlag flag);

/// Boxes on the virtual inputs. The u0 box must not contain zero, which
/// also enforces u0 != 0.
/// Defaults: u0 between g/2 and 2g, |u1| <= 0.5 rad/s^2.
struct InputConstraintSet {
    Box u0{4.9, 19.6};
    Box u0_dot{-50.0, 50.0};
    Box u0_ddot{-500.0, 500.0};
    Box u1{-0.5, 0.5};
    Box u2_first{-60.0, 60.0};
    Box u2_second{-60.0, 60.0};

    void validate() const;

    /// Bitmask of ConstraintFlag for every violated box.
    [[nodiscard]] std::uint32_t violations(const VirtualInputs& v) const;
};

}  // namespace ucfas

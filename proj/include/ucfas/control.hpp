#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "ucfas/fas_model.hpp"
#include "ucfas/plant.hpp"
#include "ucfas/trajectory.hpp"
#include "ucfas/types.hpp"

namespace ucfas {

/// Gain rows of the three closed loops. Defaults place the altitude and yaw
/// poles at {-4, -5} and each lateral channel at {-5, -6, -7, -8}.
struct ControllerGains {
    Eigen::RowVector2d altitude{20.0, 9.0};
    Eigen::RowVector2d yaw{20.0, 9.0};
    Eigen::RowVector4d lateral_x{1680.0, 1066.0, 251.0, 26.0};
    Eigen::RowVector4d lateral_y{1680.0, 1066.0, 251.0, 26.0};

    /// blkdiag(lateral_x, lateral_y) acting on [x, x', x'', x''', y, ...].
    [[nodiscard]] Eigen::Matrix<double, 2, 8> lateral_block() const;
};

/// Altitude law with its analytic derivative chain. The derivatives come
/// from substituting the closed loop z'' = u0 - g, so no input derivative
/// is ever estimated.
[[nodiscard]] ThrustChain altitude_law(double z, double vz, const ReferenceSample& ref,
                                       const Eigen::RowVector2d& gains, double gravity);

[[nodiscard]] double yaw_law(double psi, double psi_rate, const ReferenceSample& ref,
                             const Eigen::RowVector2d& gains);

/// X, X', X'', X''' reconstructed from position, velocity, attitude and the
/// thrust chain: X'' = u0 f, X''' = u0' f + u0 Gamma Phi'.
using LateralChain = std::array<Eigen::Vector2d, 4>;

[[nodiscard]] LateralChain lateral_chain(const PlantState& state, const Eigen::Vector3d& angle_rates,
                                         const ThrustChain& thrust);

/// Solves G_X u2 = -(A2 (X - X*)^(0..3) + g_X - X*^(4)). Throws
/// NearSingularInputError when G_X is singular.
[[nodiscard]] Eigen::Vector2d lateral_law(const LateralChain& chain, const Eigen::Vector3d& angles,
                                          const Eigen::Vector3d& angle_rates, const ThrustChain& thrust,
                                          double u1, const ReferenceSample& ref, const ControllerGains& gains);

struct ControlStepResult {
    PhysicalInput raw;
    PhysicalInput saturated;
    VirtualInputs virtual_inputs;
};

/// Full cascade: altitude, yaw, Euler rates, lateral chain, lateral law,
/// inverse input map, saturation.
[[nodiscard]] ControlStepResult control_step(const PlantState& state, const ReferenceSample& ref,
                                             const ControllerGains& gains, const QuadrotorParams& params,
                                             const ActuatorLimits& limits);

/// Reaction to a NearSingularInputError inside the loop.
enum class SingularPolicy {
    abort,        // propagate the error
    hold_command, // reuse the last good command, flag the sample infeasible
};

/// Closed-loop controller for the simulator: tracks a reference generator,
/// flags virtual-input constraint violations and applies SingularPolicy.
/// The only state it carries is the last good command for hold_command.
class TrackingController {
public:
    TrackingController(ControllerGains gains, QuadrotorParams params, ActuatorLimits limits,
                       InputConstraintSet constraints, ReferenceGenerator reference,
                       SingularPolicy policy = SingularPolicy::abort);

    ControlSample operator()(const PlantState& state, double t);

private:
    ControllerGains gains_;
    QuadrotorParams params_;
    ActuatorLimits limits_;
    InputConstraintSet constraints_;
    ReferenceGenerator reference_;
    SingularPolicy policy_;
    std::optional<ControlSample> last_good_;
};

}  // namespace ucfas

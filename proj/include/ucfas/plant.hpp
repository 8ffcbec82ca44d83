#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ucfas/errors.hpp"
#include "ucfas/types.hpp"

namespace ucfas {

/// Distance kept from +/- pi/2 on roll and pitch.
inline constexpr double kAngleMargin = 1e-6;

/// Box constraints applied to the actuators. Defaults are T in [-100, 100] N
/// and each torque in [-0.5, 0.5] N m.
struct ActuatorLimits {
    double thrust_min = -100.0;
    double thrust_max = 100.0;
    double torque_min = -0.5;
    double torque_max = 0.5;

    void validate() const;
};

[[nodiscard]] bool is_interior(double phi, double theta, double margin = kAngleMargin);
[[nodiscard]] bool is_interior(const PlantState& s, double margin = kAngleMargin);

/// Time derivative of the 12-state rigid body. The Euler-rate kinematics use
/// the sign convention
///   phi'   = p + q sin(phi) tan(theta) - r cos(phi) tan(theta)
///   theta' = q cos(phi) + r sin(phi)
///   psi'   = -q sin(phi)/cos(theta) + r cos(phi)/cos(theta)
/// Throws SingularKinematicsError outside the interior region.
[[nodiscard]] PlantState plant_derivative(const PlantState& state, const PhysicalInput& input,
                                          const QuadrotorParams& params);

[[nodiscard]] PhysicalInput saturate(const PhysicalInput& input, const ActuatorLimits& limits);

/// One classical RK4 step with the input held constant.
[[nodiscard]] PlantState step_rk4(const PlantState& state, const PhysicalInput& input,
                                  const QuadrotorParams& params, double dt);

/// What a controller hands back to the simulator each time it is evaluated.
/// Only `command` drives the plant; the rest is carried into the log.
struct ControlSample {
    PhysicalInput command;
    VirtualInputs virtual_inputs;
    ReferenceSample reference;
    std::uint32_t violation_flags = 0;  // virtual-input box violations, see ConstraintFlag
    bool infeasible = false;            // controller could not evaluate, command was held
};

using Controller = std::function<ControlSample(const PlantState&, double)>;

/// How the command is applied between log samples.
enum class InputHold {
    zero_order,  // evaluated once per step, held over the step
    per_stage,   // re-evaluated at every RK4 stage (continuous-time law)
};

struct SimulationOptions {
    double horizon = 10.0;
    double dt = 1e-3;
    InputHold hold = InputHold::zero_order;
    bool truncate_on_error = false;
};

struct SimulationFailure {
    double time = 0;
    std::string message;
};

/// Column-oriented simulation record, one entry per sample.
struct TrajectoryLog {
    double dt = 0;
    std::vector<double> time;
    std::vector<PlantState> state;
    std::vector<PhysicalInput> raw_input;
    std::vector<PhysicalInput> applied_input;
    std::vector<VirtualInputs> virtual_inputs;
    std::vector<ReferenceSample> reference;
    std::vector<double> position_error;  // |[x y z] - [x* y* z*]|
    std::vector<double> yaw_error;       // |psi - psi*|
    std::vector<std::uint32_t> violation_flags;
    std::vector<std::uint8_t> infeasible;
    std::optional<SimulationFailure> failure;

    [[nodiscard]] std::size_t size() const { return time.size(); }
    void reserve(std::size_t n);
};

/// Number of samples for a horizon: floor(horizon / dt) + 1.
[[nodiscard]] std::size_t sample_count(double horizon, double dt);

/// Closed-loop simulation. The controller is evaluated at every sample,
/// its command saturated and applied to the plant. Both raw and saturated
/// commands are logged. On a singular-kinematics event the error is
/// rethrown with the time attached, unless `truncate_on_error` is set, in
/// which case the log up to the failure is returned with `failure` filled.
[[nodiscard]] TrajectoryLog simulate(const PlantState& initial, const Controller& controller,
                                     const ActuatorLimits& limits, const QuadrotorParams& params,
                                     const SimulationOptions& options);

}  // namespace ucfas

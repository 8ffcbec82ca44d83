#include "ucfas/control.hpp"

#include <utility>

#include "ucfas/errors.hpp"

namespace ucfas {

Eigen::Matrix<double, 2, 8> ControllerGains::lateral_block() const {
    Eigen::Matrix<double, 2, 8> a = Eigen::Matrix<double, 2, 8>::Zero();
    a.block<1, 4>(0, 0) = lateral_x;
    a.block<1, 4>(1, 4) = lateral_y;
    return a;
}

ThrustChain altitude_law(double z, double vz, const ReferenceSample& ref, const Eigen::RowVector2d& a,
                         double gravity) {
    const double e0 = z - ref.z[0];
    const double e1 = vz - ref.z[1];
    ThrustChain out;
    out.u0 = -(a(0) * e0 + a(1) * e1) + gravity + ref.z[2];
    const double e2 = out.u0 - gravity - ref.z[2];
    out.u0_dot = -(a(0) * e1 + a(1) * e2) + ref.z[3];
    const double e3 = out.u0_dot - ref.z[3];
    out.u0_ddot = -(a(0) * e2 + a(1) * e3) + ref.z[4];
    return out;
}

double yaw_law(double psi, double psi_rate, const ReferenceSample& ref, const Eigen::RowVector2d& a) {
    return -(a(0) * (psi - ref.psi[0]) + a(1) * (psi_rate - ref.psi[1])) + ref.psi[2];
}

LateralChain lateral_chain(const PlantState& s, const Eigen::Vector3d& angle_rates, const ThrustChain& th) {
    const Eigen::Vector3d angles = s.attitude();
    const ThrustDirection f = thrust_direction(angles);
    const GammaPair g = gamma(angles);
    const Eigen::Vector2d dir(f.fx, f.fy);
    const Eigen::Vector2d turn(g.x.dot(angle_rates), g.y.dot(angle_rates));
    return {Eigen::Vector2d(s.x, s.y), Eigen::Vector2d(s.vx, s.vy), th.u0 * dir,
            th.u0_dot * dir + th.u0 * turn};
}

Eigen::Vector2d lateral_law(const LateralChain& chain, const Eigen::Vector3d& angles,
                            const Eigen::Vector3d& angle_rates, const ThrustChain& thrust, double u1,
                            const ReferenceSample& ref, const ControllerGains& gains) {
    Eigen::Vector4d ex, ey;
    for (int k = 0; k < 4; ++k) {
        const Eigen::Vector2d e = chain[k] - ref.lateral[k];
        ex(k) = e(0);
        ey(k) = e(1);
    }
    const Eigen::Vector2d feedback(gains.lateral_x.dot(ex), gains.lateral_y.dot(ey));
    const LateralInputMatrix g = lateral_input_matrix(angles, thrust.u0);
    const Eigen::Vector2d rhs = feedback + lateral_drift(angles, angle_rates, thrust, u1) - ref.lateral[4];
    // 2x2 inverse via the adjugate; the determinant was checked above.
    Eigen::Matrix2d adj;
    adj << g.matrix(1, 1), -g.matrix(0, 1), -g.matrix(1, 0), g.matrix(0, 0);
    return -(adj * rhs) / g.det_cofactor;
}

ControlStepResult control_step(const PlantState& state, const ReferenceSample& ref, const ControllerGains& gains,
                               const QuadrotorParams& params, const ActuatorLimits& limits) {
    ControlStepResult out;
    VirtualInputs& v = out.virtual_inputs;

    v.thrust = altitude_law(state.z, state.vz, ref, gains.altitude, params.gravity);

    const Eigen::Vector3d angles = state.attitude();
    const Eigen::Vector3d angle_rates = euler_matrix(state.phi, state.theta) * state.body_rates();
    v.u1 = yaw_law(state.psi, angle_rates(2), ref, gains.yaw);

    const LateralChain chain = lateral_chain(state, angle_rates, v.thrust);
    v.u2 = lateral_law(chain, angles, angle_rates, v.thrust, v.u1, ref, gains);

    out.raw = virtual_to_physical(v, state, params);
    out.saturated = saturate(out.raw, limits);
    return out;
}

TrackingController::TrackingController(ControllerGains gains, QuadrotorParams params, ActuatorLimits limits,
                                       InputConstraintSet constraints, ReferenceGenerator reference,
                                       SingularPolicy policy)
    : gains_(std::move(gains)),
      params_(params),
      limits_(limits),
      constraints_(constraints),
      reference_(std::move(reference)),
      policy_(policy) {}

ControlSample TrackingController::operator()(const PlantState& state, double t) {
    ControlSample sample;
    sample.reference = reference_(t);
    try {
        const ControlStepResult step = control_step(state, sample.reference, gains_, params_, limits_);
        sample.command = step.raw;
        sample.virtual_inputs = step.virtual_inputs;
        sample.violation_flags = constraints_.violations(step.virtual_inputs);
        last_good_ = sample;
    } catch (const NearSingularInputError&) {
        if (policy_ == SingularPolicy::abort || !last_good_) throw;
        sample.command = last_good_->command;
        sample.virtual_inputs = last_good_->virtual_inputs;
        sample.violation_flags = kViolU0;
        sample.infeasible = true;
    }
    return sample;
}

}  // namespace ucfas

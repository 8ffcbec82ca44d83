#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "ucfas/control.hpp"
#include "ucfas/errors.hpp"

using namespace ucfas;

namespace {

const QuadrotorParams kParams;
const ControllerGains kGains;
const ReferenceSample kZeroRef = constant_reference(0, 0, Eigen::Vector2d::Zero());

}  // namespace

TEST(AltitudeLaw, ZeroErrorGivesHover) {
    const ReferenceSample ref = constant_reference(2.0, 0, Eigen::Vector2d::Zero());
    const ThrustChain th = altitude_law(2.0, 0.0, ref, kGains.altitude, 9.8);
    EXPECT_EQ(th.u0, 9.8);
    EXPECT_EQ(th.u0_dot, 0.0);
    EXPECT_EQ(th.u0_ddot, 0.0);
}

TEST(AltitudeLaw, UnitStep) {
    const ReferenceSample ref = constant_reference(1.0, 0, Eigen::Vector2d::Zero());
    const ThrustChain th = altitude_law(0.0, 0.0, ref, kGains.altitude, 9.8);
    EXPECT_NEAR(th.u0, 29.8, 1e-12);
    EXPECT_NEAR(th.u0_dot, -180.0, 1e-12);
    EXPECT_NEAR(th.u0_ddot, 1220.0, 1e-12);
}

TEST(AltitudeLaw, RegulationForm) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const double z = u(rng), vz = u(rng);
        EXPECT_NEAR(altitude_law(z, vz, kZeroRef, kGains.altitude, 9.8).u0, -(20 * z + 9 * vz) + 9.8, 1e-12);
    }
}

TEST(YawLaw, Examples) {
    EXPECT_NEAR(yaw_law(0.1, 0.0, kZeroRef, kGains.yaw), -2.0, 1e-15);
    EXPECT_EQ(yaw_law(0.0, 1.0, kZeroRef, kGains.yaw), -9.0);
    ReferenceSample ref = kZeroRef;
    ref.psi[2] = 0.5;
    EXPECT_EQ(yaw_law(0.0, 0.0, ref, kGains.yaw), 0.5);
}

TEST(LateralLaw, HoverZeroError) {
    const ThrustChain th{9.8, 0, 0};
    const LateralChain chain = lateral_chain({}, Eigen::Vector3d::Zero(), th);
    const Eigen::Vector2d u2 = lateral_law(chain, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), th, 0, kZeroRef, kGains);
    EXPECT_EQ(u2.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LateralLaw, PositionErrorExample) {
    const ThrustChain th{9.8, 0, 0};
    LateralChain chain;
    chain.fill(Eigen::Vector2d::Zero());
    chain[0] = Eigen::Vector2d(1, 0);
    const Eigen::Vector2d u2 = lateral_law(chain, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), th, 0, kZeroRef, kGains);
    EXPECT_NEAR(u2(0), 0.0, 1e-12);
    EXPECT_NEAR(u2(1), -1680.0 / 9.8, 1e-12);
    EXPECT_NEAR(u2(1), -171.43, 5e-3);
}

TEST(LateralLaw, ClosesTheLoop) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u0(3.0, 20.0), small(-1, 1);
    const SpiralSpec spec;
    for (int i = 0; i < 500; ++i) {
        const PlantState s = test::random_state(rng, 0.3);
        const Eigen::Vector3d rates = test::random_vector(rng, 1.0);
        const ThrustChain th{u0(rng), small(rng), small(rng)};
        const double u1 = small(rng);
        const ReferenceSample ref = spiral_reference(10 * (1 + small(rng)), spec);
        const LateralChain chain = lateral_chain(s, rates, th);
        const Eigen::Vector2d u2 = lateral_law(chain, s.attitude(), rates, th, u1, ref, kGains);
        const Eigen::Vector2d x4 = lateral_fourth_derivative(s.attitude(), rates, th, u1, u2);
        Eigen::Vector2d residual = x4 - ref.lateral[4];
        for (int k = 0; k < 4; ++k) {
            const Eigen::Vector2d e = chain[k] - ref.lateral[k];
            residual(0) += kGains.lateral_x(k) * e(0);
            residual(1) += kGains.lateral_y(k) * e(1);
        }
        EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-8 * (1 + x4.cwiseAbs().maxCoeff()));
    }
}

TEST(ControlStep, HoverTracking) {
    const ControlStepResult r = control_step({}, kZeroRef, kGains, kParams, ActuatorLimits{});
    EXPECT_NEAR(r.raw.thrust, 6.125, 1e-14);
    EXPECT_EQ(r.raw.tau_phi, 0.0);
    EXPECT_EQ(r.raw.tau_theta, 0.0);
    EXPECT_EQ(r.raw.tau_psi, 0.0);
}

TEST(ControlStep, AltitudeStepThrust) {
    const ReferenceSample ref = constant_reference(1.0, 0, Eigen::Vector2d::Zero());
    const ControlStepResult r = control_step({}, ref, kGains, kParams, ActuatorLimits{});
    EXPECT_NEAR(r.raw.thrust, 18.625, 1e-12);
    EXPECT_NEAR(r.virtual_inputs.thrust.u0, 29.8, 1e-12);
}

TEST(ControlStep, ZeroThrustIsNearSingular) {
    PlantState s;
    s.z = 9.8 / 20.0;  // -A0 zbar + g = 0
    EXPECT_THROW((void)control_step(s, kZeroRef, kGains, kParams, ActuatorLimits{}), NearSingularInputError);
}

TEST(ControlStep, SaturationMonotone) {
    std::mt19937_64 rng(43);
    ActuatorLimits wide;
    wide.thrust_min = -1e3;
    wide.thrust_max = 1e3;
    wide.torque_min = -10;
    wide.torque_max = 10;
    for (int i = 0; i < 300; ++i) {
        PlantState s = test::random_state(rng, 0.8);
        s.z = 0.1 * s.z;
        const ControlStepResult narrow = control_step(s, kZeroRef, kGains, kParams, ActuatorLimits{});
        if (!(narrow.raw == narrow.saturated)) continue;
        EXPECT_EQ(control_step(s, kZeroRef, kGains, kParams, wide).saturated, narrow.saturated);
    }
}

TEST(TrackingController, FlagsViolations) {
    InputConstraintSet c;
    TrackingController ctl(kGains, kParams, ActuatorLimits{}, c, [](double) { return kZeroRef; });
    PlantState s;
    s.psi = 0.1;  // u1 = -2, outside |u1| <= 0.5
    const ControlSample sample = ctl(s, 0.0);
    EXPECT_TRUE(sample.violation_flags & kViolU1);
    EXPECT_FALSE(sample.infeasible);
}

TEST(TrackingController, HoldCommandPolicy) {
    TrackingController ctl(kGains, kParams, ActuatorLimits{}, InputConstraintSet{}, [](double) { return kZeroRef; },
                           SingularPolicy::hold_command);
    const ControlSample good = ctl(PlantState{}, 0.0);
    PlantState bad;
    bad.z = 9.8 / 20.0;
    const ControlSample held = ctl(bad, 0.001);
    EXPECT_TRUE(held.infeasible);
    EXPECT_EQ(held.command, good.command);

    TrackingController strict(kGains, kParams, ActuatorLimits{}, InputConstraintSet{},
                              [](double) { return kZeroRef; });
    EXPECT_THROW((void)strict(bad, 0.0), NearSingularInputError);
}

TEST(ClosedLoop, ThrustChainMatchesLoggedDerivative) {
    PlantState s0;
    s0.z = -0.3;
    s0.vz = 0.2;
    s0.x = 0.05;
    const auto worst_error = [&](double dt, InputHold hold) {
        TrackingController ctl(kGains, kParams, ActuatorLimits{}, InputConstraintSet{},
                               [](double) { return kZeroRef; });
        const TrajectoryLog log = simulate(s0, std::ref(ctl), ActuatorLimits{}, kParams, {3.0, dt, hold});
        double worst = 0;
        for (std::size_t k = 1; k + 1 < log.size(); ++k) {
            const double fd = (log.virtual_inputs[k + 1].thrust.u0 - log.virtual_inputs[k - 1].thrust.u0) / (2 * dt);
            worst = std::max(worst, std::abs(fd - log.virtual_inputs[k].thrust.u0_dot));
        }
        return worst;
    };
    // Continuous law: central differences converge at second order.
    const double e1 = worst_error(1e-3, InputHold::per_stage), e2 = worst_error(5e-4, InputHold::per_stage);
    EXPECT_LT(e1, 1e-3);
    EXPECT_NEAR(e1 / e2, 4.0, 0.2);
    // Zero-order hold integrates a held thrust, which costs one order.
    const double z1 = worst_error(1e-3, InputHold::zero_order), z2 = worst_error(5e-4, InputHold::zero_order);
    EXPECT_NEAR(z1 / z2, 2.0, 0.2);
}

#include <gtest/gtest.h>

#include <string>

#include "ucfas/config.hpp"

using namespace ucfas;

namespace {

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text, "test.yaml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, EmptyGivesDefaults) {
    const ExperimentConfig c = parse_config("");
    EXPECT_EQ(c.quadrotor.mass, 0.625);
    EXPECT_EQ(c.simulation.horizon, 100.0);
    EXPECT_EQ(c.simulation.dt, 1e-3);
    ASSERT_TRUE(c.altitude.design.has_value());
    EXPECT_EQ(c.lateral_x.design->poles(), Eigen::VectorXd(Eigen::Vector4d(-5, -6, -7, -8)));
    EXPECT_FALSE(c.mode.has_value());
}

TEST(Config, ShippedDefaultsLoad) {
    const ExperimentConfig c = load_config(resolve_config_path("paper_defaults"));
    EXPECT_EQ(c.quadrotor.jx, 0.0019005);
    EXPECT_EQ(c.quadrotor.jz, 0.0036894);
    EXPECT_EQ(c.actuator_limits.thrust_max, 100.0);
    EXPECT_EQ(c.actuator_limits.torque_min, -0.5);
    EXPECT_EQ(c.initial_state.x, 1.3);
    EXPECT_EQ(c.initial_state.y, 0.4);
    EXPECT_EQ(c.trajectory.omega, 0.2);
    EXPECT_EQ(c.constraints.u1.upper, 0.5);
    EXPECT_EQ(c.roea.sampling.points_per_axis, 21);
}

TEST(Config, ThrustBoxInvertedNamesField) {
    const std::string e = error_of("actuator_limits:\n  thrust_min: 10\n  thrust_max: 5\n");
    EXPECT_NE(e.find("thrust_max"), std::string::npos) << e;
    EXPECT_NE(e.find("test.yaml:2"), std::string::npos) << e;
}

TEST(Config, UnknownKeyRejectedWithLine) {
    const std::string e = error_of("quadrotor:\n  mass: 1.0\n  masss: 2.0\n");
    EXPECT_NE(e.find("quadrotor.masss"), std::string::npos) << e;
    EXPECT_NE(e.find("test.yaml:3"), std::string::npos) << e;
    EXPECT_NE(error_of("bogus: 1\n").find("unknown key 'bogus'"), std::string::npos);
}

TEST(Config, TypeErrors) {
    EXPECT_NE(error_of("simulation:\n  dt: fast\n").find("simulation.dt"), std::string::npos);
    EXPECT_NE(error_of("trajectory:\n  center: [1, 2]\n").find("expected 3 entries"), std::string::npos);
    EXPECT_NE(error_of("quadrotor: 3\n").find("expected a mapping"), std::string::npos);
    EXPECT_NE(error_of("mode: fly\n").find("mode"), std::string::npos);
    EXPECT_NE(error_of("simulation:\n  input_hold: foh\n").find("input_hold"), std::string::npos);
}

TEST(Config, MalformedYaml) { EXPECT_NE(error_of("a: [1, 2\n"), ""); }

TEST(Config, Validation) {
    EXPECT_NE(error_of("quadrotor:\n  mass: -1\n").find("mass"), std::string::npos);
    EXPECT_NE(error_of("virtual_input_constraints:\n  u0: [-1, 10]\n").find("u0"), std::string::npos);
    EXPECT_NE(error_of("simulation:\n  dt: 0\n").find("dt"), std::string::npos);
    EXPECT_NE(error_of("initial_state:\n  attitude: [0, 1.6, 0]\n").find("initial_state"), std::string::npos);
    EXPECT_NE(error_of("design:\n  yaw:\n    F: [-1, -1]\n    Z: [1, 1]\n    gains: [1, 2]\n").find("either"),
              std::string::npos);
}

TEST(Config, ExplicitGains) {
    const ExperimentConfig c = parse_config("design:\n  yaw:\n    gains: [6, 5]\n");
    EXPECT_FALSE(c.yaw.design.has_value());
    EXPECT_EQ(c.yaw.explicit_gains, Eigen::RowVectorXd(Eigen::RowVector2d(6, 5)));
    EXPECT_NE(error_of("design:\n  yaw:\n    gains: [6, 5, 4]\n").find("expected 2 entries"), std::string::npos);
}

TEST(Config, ModesAndPolicies) {
    const ExperimentConfig c = parse_config(
        "mode: roea\nsimulation:\n  input_hold: per_stage\n  on_singular: hold_command\n"
        "roea:\n  subsystem: lateral\n  sampling: uniform_random\n  count: 4\n  seed: 9\n"
        "  lower: [0, 0, 0, 0, 0, 0, 0, 0]\n  upper: [1, 1, 1, 1, 1, 1, 1, 1]\n");
    EXPECT_EQ(*c.mode, Mode::roea);
    EXPECT_EQ(c.simulation.hold, InputHold::per_stage);
    EXPECT_EQ(c.on_singular, SingularPolicy::hold_command);
    EXPECT_EQ(c.roea.subsystem, Subsystem::lateral);
    EXPECT_EQ(c.roea.sampling.count, 4u);
    EXPECT_EQ(c.roea.sampling.seed, 9u);
}

TEST(Config, ResolvePath) {
    EXPECT_EQ(resolve_config_path("paper_defaults").filename(), "paper_defaults.yaml");
    EXPECT_EQ(resolve_config_path("no/such/file.yaml"), std::filesystem::path("no/such/file.yaml"));
    EXPECT_THROW((void)load_config("no/such/file.yaml"), ConfigError);
}

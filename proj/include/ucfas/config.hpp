#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "ucfas/control.hpp"
#include "ucfas/fas_model.hpp"
#include "ucfas/feasibility.hpp"
#include "ucfas/plant.hpp"
#include "ucfas/synthesis.hpp"
#include "ucfas/trajectory.hpp"
#include "ucfas/types.hpp"

namespace ucfas {

enum class Mode { synthesize, simulate, track, roea };

[[nodiscard]] const char* to_string(Mode m);
[[nodiscard]] std::optional<Mode> parse_mode(const std::string& s);

/// Invalid or unreadable configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& message);

    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

/// One channel of the controller: either a (Z, F) design or explicit gains.
struct ChannelDesign {
    std::optional<ParametricDesign> design;
    Eigen::RowVectorXd explicit_gains;
};

struct OutputSpec {
    std::filesystem::path directory = "out";
    std::string gains_file = "gains.yaml";
    std::string trajectory_csv = "trajectory.csv";
    std::string summary_file = "summary.yaml";
    std::string plot_script = "plot.py";  // empty disables emission
    std::string roea_csv = "roea.csv";
};

struct RoeaSpec {
    Subsystem subsystem = Subsystem::yaw;
    SamplingSpec sampling;
    CheckOptions check;
};

struct SummarySpec {
    double tail_window = 20.0;  // s, RMSE window ending at the horizon
    double settle_time = 5.0;   // s, violations counted separately after this
};

struct ExperimentConfig {
    QuadrotorParams quadrotor;
    ActuatorLimits actuator_limits;
    InputConstraintSet constraints;
    ChannelDesign altitude;
    ChannelDesign yaw;
    ChannelDesign lateral_x;
    ChannelDesign lateral_y;
    SpiralSpec trajectory;
    ReferenceSample setpoint = constant_reference(0.0, 0.0, Eigen::Vector2d::Zero());
    PlantState initial_state;
    SimulationOptions simulation{100.0, 1e-3, InputHold::zero_order, true};
    SingularPolicy on_singular = SingularPolicy::abort;
    SummarySpec summary;
    RoeaSpec roea;
    OutputSpec output;
    std::optional<Mode> mode;

    /// The values used to reproduce the published experiment.
    static ExperimentConfig defaults();
};

/// Parses and validates a YAML config. Absent keys take their defaults;
/// unknown keys are rejected. Throws ConfigError.
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
[[nodiscard]] ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Resolves `--config` arguments: an existing path, the same with a .yaml
/// suffix, or a named config shipped in the configs directory.
[[nodiscard]] std::filesystem::path resolve_config_path(const std::string& name);

}  // namespace ucfas

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ucfas/config.hpp"
#include "ucfas/control.hpp"
#include "ucfas/feasibility.hpp"
#include "ucfas/plant.hpp"

namespace ucfas {

/// Process exit codes of the runner.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitSingular = 3,
};

/// A synthesized (or explicitly configured) gain row with its provenance.
struct GainRecord {
    std::string channel;
    Eigen::RowVectorXd gains;
    std::optional<ParametricDesign> design;
    std::optional<double> spectrum_mismatch;
};

/// Synthesizes all four channels. Throws SingularParameterizationError.
[[nodiscard]] std::vector<GainRecord> resolve_gains(const ExperimentConfig& cfg);
[[nodiscard]] ControllerGains to_controller_gains(const std::vector<GainRecord>& records);

/// CSV columns, in file order.
[[nodiscard]] const std::vector<std::string>& trajectory_columns();

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryLog& log);

/// Statistics reported in the summary file; every value derives from the
/// logged columns alone.
struct TrajectorySummary {
    std::size_t samples = 0;
    double dt = 0;
    double final_time = 0;
    double tail_start = 0;
    double rmse_x = 0, rmse_y = 0, rmse_z = 0, rmse_psi = 0;
    double max_position_error = 0, max_yaw_error = 0;
    double max_position_error_tail = 0, max_yaw_error_tail = 0;
    std::size_t saturation_events = 0;
    std::size_t violation_events = 0;
    std::size_t violation_events_after_settle = 0;
    double settle_time = 0;
    std::size_t infeasible_events = 0;
    std::optional<SimulationFailure> failure;
};

[[nodiscard]] TrajectorySummary summarize_log(const TrajectoryLog& log, const SummarySpec& spec);

void write_summary(const std::filesystem::path& path, Mode mode, const TrajectorySummary& summary);
void write_gains_file(const std::filesystem::path& path, const std::vector<GainRecord>& records);
void write_roea_csv(const std::filesystem::path& path, const RoeaReport& report);
void write_roea_summary(const std::filesystem::path& path, const RoeaReport& report, const RoeaSpec& spec);

/// Writes a matplotlib script that renders the 3-D path against the
/// reference and six time-series panels (x, y, z, phi, theta, psi). Throws
/// std::runtime_error listing the expected columns if the CSV header does
/// not match.
void emit_plot_script(const std::filesystem::path& csv_path, const std::filesystem::path& out_path);

/// Runs one experiment. Files go to `cfg.output.directory`. Progress and
/// errors are written to `log`. Returns an ExitCode.
int run_experiment(Mode mode, const ExperimentConfig& cfg, std::ostream& log);

/// Closed-loop simulation as configured: constant setpoint for
/// Mode::simulate, the spiral for Mode::track.
[[nodiscard]] TrajectoryLog run_closed_loop(Mode mode, const ExperimentConfig& cfg, const ControllerGains& gains);

}  // namespace ucfas

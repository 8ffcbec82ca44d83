#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "ucfas/experiment.hpp"

using namespace ucfas;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(UCFAS_TEST_SCRATCH) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

ExperimentConfig short_track(const fs::path& dir) {
    ExperimentConfig cfg = load_config(resolve_config_path("paper_defaults"));
    cfg.simulation.horizon = 2.0;
    cfg.summary.tail_window = 1.0;
    cfg.summary.settle_time = 0.5;
    cfg.output.directory = dir;
    return cfg;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(UCFAS_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST(Csv, HeaderAndRows) {
    const fs::path dir = scratch("csv");
    std::ostringstream log;
    ASSERT_EQ(run_experiment(Mode::track, short_track(dir), log), kExitOk) << log.str();
    const auto rows = read_csv(dir / "trajectory.csv");
    ASSERT_EQ(rows.size(), 2002u);
    EXPECT_EQ(rows[0], trajectory_columns());
    EXPECT_EQ(rows[0].size(), 37u);
    for (const auto& r : rows) EXPECT_EQ(r.size(), rows[0].size());
    EXPECT_EQ(rows[1][0], "0");
    EXPECT_EQ(rows[1][1], "1.3");
    EXPECT_EQ(rows[2001][0], "2");
}

TEST(Csv, NumbersRoundTrip) {
    TrajectoryLog log;
    log.dt = 0.1;
    const double awkward[] = {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 9.8};
    for (double v : awkward) {
        PlantState s;
        s.x = v;
        log.time.push_back(v);
        log.state.push_back(s);
        log.raw_input.push_back({});
        log.applied_input.push_back({});
        log.virtual_inputs.push_back({});
        log.reference.push_back({});
        log.position_error.push_back(0);
        log.yaw_error.push_back(0);
        log.violation_flags.push_back(0);
        log.infeasible.push_back(0);
    }
    const fs::path dir = scratch("roundtrip");
    write_trajectory_csv(dir / "t.csv", log);
    const auto rows = read_csv(dir / "t.csv");
    for (std::size_t i = 0; i < std::size(awkward); ++i) {
        EXPECT_EQ(std::stod(rows[i + 1][1]), awkward[i]);
    }
}

TEST(Summary, RecomputableFromCsv) {
    const fs::path dir = scratch("summary");
    std::ostringstream log;
    const ExperimentConfig cfg = short_track(dir);
    ASSERT_EQ(run_experiment(Mode::track, cfg, log), kExitOk);
    const auto rows = read_csv(dir / "trajectory.csv");
    const auto col = [&](const std::string& name) {
        const auto& h = rows[0];
        return static_cast<std::size_t>(std::find(h.begin(), h.end(), name) - h.begin());
    };
    double sx = 0, sz = 0, max_pos = 0;
    std::size_t n = 0, viol = 0, sat = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto v = [&](const std::string& name) { return std::stod(rows[k][col(name)]); };
        max_pos = std::max(max_pos, v("pos_err"));
        viol += v("violation_flags") != 0;
        sat += v("T") != v("T_raw") || v("tau_phi") != v("tau_phi_raw") || v("tau_theta") != v("tau_theta_raw") ||
               v("tau_psi") != v("tau_psi_raw");
        if (v("t") >= 1.0) {
            sx += std::pow(v("x") - v("x_ref"), 2);
            sz += std::pow(v("z") - v("z_ref"), 2);
            ++n;
        }
    }
    const YAML::Node s = YAML::LoadFile((dir / "summary.yaml").string());
    EXPECT_EQ(s["samples"].as<std::size_t>(), rows.size() - 1);
    EXPECT_NEAR(s["rmse_tail"]["x"].as<double>(), std::sqrt(sx / n), 1e-15);
    EXPECT_NEAR(s["rmse_tail"]["z"].as<double>(), std::sqrt(sz / n), 1e-15);
    EXPECT_EQ(s["max_error"]["position"].as<double>(), max_pos);
    EXPECT_EQ(s["feasibility_violation_events"].as<std::size_t>(), viol);
    EXPECT_EQ(s["saturation_events"].as<std::size_t>(), sat);
}

TEST(Gains, FileEchoesProvenance) {
    const fs::path dir = scratch("gains");
    ExperimentConfig cfg = short_track(dir);
    std::ostringstream log;
    ASSERT_EQ(run_experiment(Mode::synthesize, cfg, log), kExitOk);
    const YAML::Node g = YAML::LoadFile((dir / "gains.yaml").string());
    const auto alt = g["altitude"]["gains"].as<std::vector<double>>();
    EXPECT_NEAR(alt[0], 20, 1e-9);
    EXPECT_NEAR(alt[1], 9, 1e-9);
    const auto lat = g["lateral_y"]["gains"].as<std::vector<double>>();
    EXPECT_NEAR(lat[0], 1680, 1e-9);
    EXPECT_NEAR(lat[3], 26, 1e-9);
    EXPECT_EQ(g["lateral_x"]["F_diagonal"].as<std::vector<double>>(), (std::vector<double>{-5, -6, -7, -8}));
    EXPECT_EQ(g["yaw"]["Z"].as<std::vector<double>>(), (std::vector<double>{1, 1}));
    EXPECT_FALSE(fs::exists(dir / "trajectory.csv"));
}

TEST(Run, ModeMismatchIsConfigError) {
    ExperimentConfig cfg = short_track(scratch("mismatch"));
    cfg.mode = Mode::roea;
    std::ostringstream log;
    EXPECT_EQ(run_experiment(Mode::track, cfg, log), kExitConfig);
}

TEST(Run, SingularDesignIsConfigError) {
    ExperimentConfig cfg = short_track(scratch("singular_design"));
    cfg.yaw.design = ParametricDesign::scalar(Eigen::RowVector2d(1, 1), Eigen::Vector2d(-1, -1));
    std::ostringstream log;
    EXPECT_EQ(run_experiment(Mode::synthesize, cfg, log), kExitConfig);
}

TEST(Run, RuntimeSingularityFlushesPartialLog) {
    const fs::path dir = scratch("singular");
    ExperimentConfig cfg = short_track(dir);
    cfg.initial_state = {};
    cfg.initial_state.theta = 1.5707;
    cfg.initial_state.q = 50.0;
    std::ostringstream log;
    EXPECT_EQ(run_experiment(Mode::simulate, cfg, log), kExitSingular) << log.str();
    const auto rows = read_csv(dir / "trajectory.csv");
    EXPECT_GE(rows.size(), 2u);
    EXPECT_LT(rows.size(), 2002u);
    const YAML::Node s = YAML::LoadFile((dir / "summary.yaml").string());
    EXPECT_TRUE(s["failure"].IsMap());
}

TEST(Run, RoeaWritesReport) {
    const fs::path dir = scratch("roea");
    ExperimentConfig cfg = short_track(dir);
    std::ostringstream log;
    ASSERT_EQ(run_experiment(Mode::roea, cfg, log), kExitOk);
    const auto rows = read_csv(dir / "roea.csv");
    EXPECT_EQ(rows.size(), 442u);
    const YAML::Node s = YAML::LoadFile((dir / "summary.yaml").string());
    EXPECT_EQ(s["members"].as<std::size_t>(), 225u);
}

TEST(PlotScript, MissingColumnIsReported) {
    const fs::path dir = scratch("plot_bad");
    std::ofstream(dir / "t.csv") << "t,x,y,z\n0,1,2,3\n";
    try {
        emit_plot_script(dir / "t.csv", dir / "plot.py");
        FAIL();
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("psi_ref"), std::string::npos);
        EXPECT_NE(msg.find("expected columns"), std::string::npos);
    }
    EXPECT_FALSE(fs::exists(dir / "plot.py"));
}

TEST(PlotScript, RendersTwoImages) {
    const fs::path dir = scratch("plot_ok");
    std::ostringstream log;
    ASSERT_EQ(run_experiment(Mode::track, short_track(dir), log), kExitOk);
    ASSERT_TRUE(fs::exists(dir / "plot.py"));
    const std::string cmd = "python3 " + (dir / "plot.py").string() + " > /dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir / "trajectory_3d.png"));
    EXPECT_TRUE(fs::exists(dir / "tracking_response.png"));
}

TEST(PlotScript, EmptyLog) {
    const fs::path dir = scratch("plot_empty");
    write_trajectory_csv(dir / "trajectory.csv", TrajectoryLog{});
    emit_plot_script(dir / "trajectory.csv", dir / "plot.py");
    const std::string cmd = "python3 " + (dir / "plot.py").string() + " > /dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir / "trajectory_3d.png"));
    EXPECT_TRUE(fs::exists(dir / "tracking_response.png"));
}

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch("cli");
    EXPECT_EQ(run_cli("synthesize --config paper_defaults --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "gains.yaml"));

    std::ofstream(dir / "bad.yaml") << "actuator_limits:\n  thrust_min: 10\n  thrust_max: 5\n";
    EXPECT_EQ(run_cli("track --config " + (dir / "bad.yaml").string() + " --out " + dir.string()), 2);
    EXPECT_EQ(run_cli("track --config " + (dir / "missing.yaml").string()), 2);
    EXPECT_EQ(run_cli("track"), 2);
    EXPECT_EQ(run_cli("fly --config paper_defaults"), 2);

    std::ofstream(dir / "tumble.yaml") << "initial_state:\n  attitude: [0, 1.5707, 0]\n  body_rates: [0, 50, 0]\n"
                                          "simulation:\n  horizon: 1.0\n";
    EXPECT_EQ(run_cli("simulate --config " + (dir / "tumble.yaml").string() + " --out " + dir.string()), 3);
}

TEST(Cli, DeterministicTrack) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    std::ofstream(a / "short.yaml") << "simulation:\n  horizon: 3.0\n";
    EXPECT_EQ(run_cli("track --config " + (a / "short.yaml").string() + " --out " + a.string()), 0);
    EXPECT_EQ(run_cli("track --config " + (a / "short.yaml").string() + " --out " + b.string()), 0);
    EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
    EXPECT_EQ(slurp(a / "summary.yaml"), slurp(b / "summary.yaml"));
}

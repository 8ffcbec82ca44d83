#include "ucfas/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "ucfas/errors.hpp"
#include "ucfas/synthesis.hpp"
#include "ucfas/trajectory.hpp"

namespace ucfas {

namespace fs = std::filesystem;

namespace {

// Shortest text that keeps 17 significant digits, so values round-trip.
void put_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void emit_row(YAML::Emitter& e, const Eigen::MatrixXd& m) {
    e << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index i = 0; i < m.size(); ++i) e << m.data()[i];
    e << YAML::EndSeq;
}

}  // namespace

std::vector<GainRecord> resolve_gains(const ExperimentConfig& cfg) {
    const std::pair<const char*, const ChannelDesign*> channels[] = {{"altitude", &cfg.altitude},
                                                                     {"yaw", &cfg.yaw},
                                                                     {"lateral_x", &cfg.lateral_x},
                                                                     {"lateral_y", &cfg.lateral_y}};
    std::vector<GainRecord> out;
    for (const auto& [name, ch] : channels) {
        GainRecord rec;
        rec.channel = name;
        if (ch->design) {
            const GainRow row = synthesize_gains(*ch->design);
            rec.gains = row.gains.row(0);
            rec.design = ch->design;
            rec.spectrum_mismatch = verify_spectrum(row);
        } else {
            rec.gains = ch->explicit_gains;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

ControllerGains to_controller_gains(const std::vector<GainRecord>& records) {
    ControllerGains g;
    for (const auto& r : records) {
        if (r.channel == "altitude") g.altitude = r.gains;
        if (r.channel == "yaw") g.yaw = r.gains;
        if (r.channel == "lateral_x") g.lateral_x = r.gains;
        if (r.channel == "lateral_y") g.lateral_y = r.gains;
    }
    return g;
}

const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> columns = {
        "t",           "x",          "y",         "z",           "vx",          "vy",          "vz",
        "phi",         "theta",      "psi",       "p",           "q",           "r",           "x_ref",
        "y_ref",       "z_ref",      "psi_ref",   "z_ref_dot",   "psi_ref_dot", "T_raw",       "tau_phi_raw",
        "tau_theta_raw", "tau_psi_raw", "T",      "tau_phi",     "tau_theta",   "tau_psi",     "u0",
        "u0_dot",      "u0_ddot",    "u1",        "u2_1",        "u2_2",        "pos_err",     "yaw_err",
        "violation_flags", "infeasible"};
    return columns;
}

void write_trajectory_csv(const fs::path& path, const TrajectoryLog& log) {
    std::ofstream out = open_output(path);
    std::string line;
    const auto& cols = trajectory_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) line += ',';
        line += cols[i];
    }
    line += '\n';
    out << line;

    for (std::size_t k = 0; k < log.size(); ++k) {
        const PlantState& s = log.state[k];
        const ReferenceSample& ref = log.reference[k];
        const PhysicalInput& raw = log.raw_input[k];
        const PhysicalInput& sat = log.applied_input[k];
        const VirtualInputs& v = log.virtual_inputs[k];
        const double values[] = {log.time[k], s.x, s.y, s.z, s.vx, s.vy, s.vz, s.phi, s.theta, s.psi, s.p, s.q,
                                 s.r, ref.lateral[0](0), ref.lateral[0](1), ref.z[0], ref.psi[0], ref.z[1],
                                 ref.psi[1], raw.thrust, raw.tau_phi, raw.tau_theta, raw.tau_psi, sat.thrust,
                                 sat.tau_phi, sat.tau_theta, sat.tau_psi, v.thrust.u0, v.thrust.u0_dot,
                                 v.thrust.u0_ddot, v.u1, v.u2(0), v.u2(1), log.position_error[k], log.yaw_error[k]};
        line.clear();
        for (double value : values) {
            put_number(line, value);
            line += ',';
        }
        line += std::to_string(log.violation_flags[k]);
        line += ',';
        line += std::to_string(static_cast<int>(log.infeasible[k]));
        line += '\n';
        out << line;
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

TrajectorySummary summarize_log(const TrajectoryLog& log, const SummarySpec& spec) {
    TrajectorySummary sum;
    sum.samples = log.size();
    sum.dt = log.dt;
    sum.settle_time = spec.settle_time;
    sum.failure = log.failure;
    if (log.size() == 0) return sum;
    sum.final_time = log.time.back();
    sum.tail_start = std::max(0.0, sum.final_time - spec.tail_window);

    double sx = 0, sy = 0, sz = 0, spsi = 0;
    std::size_t tail = 0;
    for (std::size_t k = 0; k < log.size(); ++k) {
        const PlantState& s = log.state[k];
        const ReferenceSample& ref = log.reference[k];
        sum.max_position_error = std::max(sum.max_position_error, log.position_error[k]);
        sum.max_yaw_error = std::max(sum.max_yaw_error, log.yaw_error[k]);
        if (!(log.raw_input[k] == log.applied_input[k])) ++sum.saturation_events;
        if (log.violation_flags[k] != 0) {
            ++sum.violation_events;
            if (log.time[k] > spec.settle_time) ++sum.violation_events_after_settle;
        }
        if (log.infeasible[k]) ++sum.infeasible_events;
        if (log.time[k] >= sum.tail_start) {
            const double ex = s.x - ref.lateral[0](0), ey = s.y - ref.lateral[0](1), ez = s.z - ref.z[0];
            const double epsi = s.psi - ref.psi[0];
            sx += ex * ex;
            sy += ey * ey;
            sz += ez * ez;
            spsi += epsi * epsi;
            sum.max_position_error_tail = std::max(sum.max_position_error_tail, log.position_error[k]);
            sum.max_yaw_error_tail = std::max(sum.max_yaw_error_tail, log.yaw_error[k]);
            ++tail;
        }
    }
    const double n = static_cast<double>(tail);
    sum.rmse_x = std::sqrt(sx / n);
    sum.rmse_y = std::sqrt(sy / n);
    sum.rmse_z = std::sqrt(sz / n);
    sum.rmse_psi = std::sqrt(spsi / n);
    return sum;
}

void write_summary(const fs::path& path, Mode mode, const TrajectorySummary& s) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "mode" << YAML::Value << to_string(mode);
    e << YAML::Key << "samples" << YAML::Value << s.samples;
    e << YAML::Key << "dt" << YAML::Value << s.dt;
    e << YAML::Key << "final_time" << YAML::Value << s.final_time;
    e << YAML::Key << "tail_window" << YAML::Value << YAML::Flow << YAML::BeginSeq << s.tail_start << s.final_time
      << YAML::EndSeq;
    e << YAML::Key << "rmse_tail" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "x" << YAML::Value << s.rmse_x;
    e << YAML::Key << "y" << YAML::Value << s.rmse_y;
    e << YAML::Key << "z" << YAML::Value << s.rmse_z;
    e << YAML::Key << "psi" << YAML::Value << s.rmse_psi;
    e << YAML::EndMap;
    e << YAML::Key << "max_error" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "position" << YAML::Value << s.max_position_error;
    e << YAML::Key << "yaw" << YAML::Value << s.max_yaw_error;
    e << YAML::Key << "position_tail" << YAML::Value << s.max_position_error_tail;
    e << YAML::Key << "yaw_tail" << YAML::Value << s.max_yaw_error_tail;
    e << YAML::EndMap;
    e << YAML::Key << "saturation_events" << YAML::Value << s.saturation_events;
    e << YAML::Key << "feasibility_violation_events" << YAML::Value << s.violation_events;
    e << YAML::Key << "settle_time" << YAML::Value << s.settle_time;
    e << YAML::Key << "feasibility_violation_events_after_settle" << YAML::Value
      << s.violation_events_after_settle;
    e << YAML::Key << "infeasible_events" << YAML::Value << s.infeasible_events;
    if (s.failure) {
        e << YAML::Key << "failure" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "time" << YAML::Value << s.failure->time;
        e << YAML::Key << "message" << YAML::Value << s.failure->message;
        e << YAML::EndMap;
    }
    e << YAML::EndMap;
    std::ofstream out = open_output(path);
    out << e.c_str() << '\n';
}

void write_gains_file(const fs::path& path, const std::vector<GainRecord>& records) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    for (const auto& r : records) {
        e << YAML::Key << r.channel << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "gains" << YAML::Value;
        emit_row(e, r.gains);
        if (r.design) {
            e << YAML::Key << "Z" << YAML::Value;
            emit_row(e, r.design->Z);
            e << YAML::Key << "F_diagonal" << YAML::Value;
            emit_row(e, r.design->poles());
            e << YAML::Key << "spectrum_mismatch" << YAML::Value << *r.spectrum_mismatch;
        } else {
            e << YAML::Key << "source" << YAML::Value << "explicit";
        }
        e << YAML::EndMap;
    }
    e << YAML::EndMap;
    std::ofstream out = open_output(path);
    out << e.c_str() << '\n';
}

void write_roea_csv(const fs::path& path, const RoeaReport& report) {
    std::ofstream out = open_output(path);
    const int dim = state_dimension(report.subsystem);
    std::string line = "index";
    for (int d = 0; d < dim; ++d) line += ",x0_" + std::to_string(d);
    line += ",status,worst_margin,violation_time,violation\n";
    out << line;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const MembershipEntry& e = report.entries[i];
        line = std::to_string(i);
        for (Eigen::Index d = 0; d < e.initial.size(); ++d) {
            line += ',';
            put_number(line, e.initial(d));
        }
        line += ',';
        line += to_string(e.status);
        line += ',';
        put_number(line, e.worst_margin);
        line += ',';
        if (e.first_violation) {
            put_number(line, e.first_violation->time);
            line += ",\"" + e.first_violation->constraint + "\"";
        } else {
            line += ',';
        }
        line += '\n';
        out << line;
    }
}

void write_roea_summary(const fs::path& path, const RoeaReport& report, const RoeaSpec& spec) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "mode" << YAML::Value << "roea";
    e << YAML::Key << "subsystem" << YAML::Value << to_string(report.subsystem);
    e << YAML::Key << "samples" << YAML::Value << report.entries.size();
    e << YAML::Key << "members" << YAML::Value << report.members;
    e << YAML::Key << "non_members" << YAML::Value << report.non_members;
    e << YAML::Key << "marginal" << YAML::Value << report.marginal;
    e << YAML::Key << "member_fraction" << YAML::Value << report.member_fraction();
    e << YAML::Key << "horizon" << YAML::Value << spec.check.horizon;
    e << YAML::Key << "dt" << YAML::Value << spec.check.dt;
    if (report.member_bounds) {
        e << YAML::Key << "member_bounds" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "lower" << YAML::Value;
        emit_row(e, report.member_bounds->first);
        e << YAML::Key << "upper" << YAML::Value;
        emit_row(e, report.member_bounds->second);
        e << YAML::EndMap;
    }
    e << YAML::EndMap;
    std::ofstream out = open_output(path);
    out << e.c_str() << '\n';
}

namespace {

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Renders a ucfas trajectory log: 3-D path and per-axis tracking panels.

Usage: python3 plot.py [output_dir]
"""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_PATH = os.path.join(HERE, @CSV@)
OUT_DIR = sys.argv[1] if len(sys.argv) > 1 else HERE


def load(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        cols = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                cols[name].append(float(value))
    return cols


def main():
    d = load(CSV_PATH)
    os.makedirs(OUT_DIR, exist_ok=True)

    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    ax.plot(d["x_ref"], d["y_ref"], d["z_ref"], "--", label="reference")
    ax.plot(d["x"], d["y"], d["z"], label="quadrotor")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_zlabel("z [m]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(OUT_DIR, "trajectory_3d.png"), dpi=120)
    plt.close(fig)

    panels = [
        ("x", "x_ref", "x [m]"),
        ("y", "y_ref", "y [m]"),
        ("z", "z_ref", "z [m]"),
        ("phi", None, "phi [rad]"),
        ("theta", None, "theta [rad]"),
        ("psi", "psi_ref", "psi [rad]"),
    ]
    fig, axes = plt.subplots(3, 2, figsize=(10, 8), sharex=True)
    for ax, (name, ref, label) in zip(axes.T.flat, panels):
        ax.plot(d["t"], d[name], label=name)
        if ref is not None:
            ax.plot(d["t"], d[ref], "--", label=ref)
        ax.set_ylabel(label)
        ax.grid(True)
        ax.legend(loc="upper right")
    for ax in axes[-1]:
        ax.set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(os.path.join(OUT_DIR, "tracking_response.png"), dpi=120)
    plt.close(fig)


if __name__ == "__main__":
    main()
)PY";

std::vector<std::string> split_header(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty() && item.back() == '\r') item.pop_back();
        out.push_back(item);
    }
    return out;
}

std::string python_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '\\' || c == '"') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void emit_plot_script(const fs::path& csv_path, const fs::path& out_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot read trajectory log " + csv_path.string());
    std::string header;
    std::getline(in, header);
    const std::vector<std::string> found = split_header(header);
    const std::set<std::string> present(found.begin(), found.end());
    std::vector<std::string> missing;
    for (const auto& col : trajectory_columns()) {
        if (!present.contains(col)) missing.push_back(col);
    }
    if (!missing.empty()) {
        std::string msg = "trajectory log header mismatch in " + csv_path.string() + "; missing:";
        for (const auto& m : missing) msg += " " + m;
        msg += "; expected columns:";
        for (const auto& c : trajectory_columns()) msg += " " + c;
        throw std::runtime_error(msg);
    }

    const fs::path script_dir = fs::absolute(out_path).parent_path();
    fs::path rel = fs::absolute(csv_path).lexically_relative(script_dir);
    if (rel.empty()) rel = fs::absolute(csv_path);

    std::string script = kPlotScript;
    const std::string token = "@CSV@";
    script.replace(script.find(token), token.size(), python_string(rel.generic_string()));
    std::ofstream out = open_output(out_path);
    out << script;
}

TrajectoryLog run_closed_loop(Mode mode, const ExperimentConfig& cfg, const ControllerGains& gains) {
    ReferenceGenerator reference;
    if (mode == Mode::track) {
        const SpiralSpec spec = cfg.trajectory;
        reference = [spec](double t) { return spiral_reference(t, spec); };
    } else {
        const ReferenceSample setpoint = cfg.setpoint;
        reference = [setpoint](double) { return setpoint; };
    }
    TrackingController controller(gains, cfg.quadrotor, cfg.actuator_limits, cfg.constraints, reference,
                                  cfg.on_singular);
    return simulate(cfg.initial_state, std::ref(controller), cfg.actuator_limits, cfg.quadrotor, cfg.simulation);
}

int run_experiment(Mode mode, const ExperimentConfig& cfg, std::ostream& log) {
    if (cfg.mode && *cfg.mode != mode) {
        log << "config error: config declares mode '" << to_string(*cfg.mode) << "' but '" << to_string(mode)
            << "' was requested\n";
        return kExitConfig;
    }
    const fs::path dir = cfg.output.directory;
    try {
        fs::create_directories(dir);

        std::vector<GainRecord> records;
        try {
            records = resolve_gains(cfg);
        } catch (const SingularParameterizationError& e) {
            log << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        write_gains_file(dir / cfg.output.gains_file, records);
        for (const auto& r : records) {
            log << r.channel << ": [";
            for (Eigen::Index i = 0; i < r.gains.size(); ++i) log << (i ? " " : "") << r.gains(i);
            log << "]";
            if (r.spectrum_mismatch) log << "  spectrum mismatch " << *r.spectrum_mismatch;
            log << '\n';
        }
        if (mode == Mode::synthesize) return kExitOk;

        const ControllerGains gains = to_controller_gains(records);
        if (mode == Mode::roea) {
            const RoeaReport report =
                estimate_roea(cfg.roea.subsystem, gains, cfg.constraints, cfg.quadrotor, cfg.roea.sampling, cfg.roea.check);
            write_roea_csv(dir / cfg.output.roea_csv, report);
            write_roea_summary(dir / cfg.output.summary_file, report, cfg.roea);
            log << to_string(report.subsystem) << " RoEA: " << report.members << "/" << report.entries.size()
                << " members, " << report.marginal << " marginal\n";
            return kExitOk;
        }

        const TrajectoryLog traj = run_closed_loop(mode, cfg, gains);
        const fs::path csv = dir / cfg.output.trajectory_csv;
        write_trajectory_csv(csv, traj);
        const TrajectorySummary summary = summarize_log(traj, cfg.summary);
        write_summary(dir / cfg.output.summary_file, mode, summary);
        if (!cfg.output.plot_script.empty()) emit_plot_script(csv, dir / cfg.output.plot_script);

        log << traj.size() << " samples written to " << csv.string() << '\n';
        if (traj.failure) {
            log << "runtime singularity: " << traj.failure->message << " (t=" << traj.failure->time << ")\n";
            return kExitSingular;
        }
        return kExitOk;
    } catch (const SingularKinematicsError& e) {
        log << "runtime singularity: " << e.what() << '\n';
        return kExitSingular;
    } catch (const NearSingularInputError& e) {
        log << "runtime singularity: " << e.what() << '\n';
        return kExitSingular;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace ucfas

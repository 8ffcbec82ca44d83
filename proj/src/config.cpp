#include "ucfas/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <yaml-cpp/yaml.h>

#ifndef UCFAS_CONFIG_DIR
#define UCFAS_CONFIG_DIR "configs"
#endif

namespace ucfas {

const char* to_string(Mode m) {
    switch (m) {
        case Mode::synthesize: return "synthesize";
        case Mode::simulate: return "simulate";
        case Mode::track: return "track";
        case Mode::roea: return "roea";
    }
    return "unknown";
}

std::optional<Mode> parse_mode(const std::string& s) {
    for (Mode m : {Mode::synthesize, Mode::simulate, Mode::track, Mode::roea}) {
        if (s == to_string(m)) return m;
    }
    return std::nullopt;
}

namespace {

std::string format_error(const std::string& source, int line, const std::string& message) {
    std::ostringstream out;
    out << source;
    if (line > 0) out << ":" << line;
    out << ": " << message;
    return out.str();
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(format_error(source, line, message)), line_(line) {}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.altitude.design = ParametricDesign::scalar(Eigen::RowVector2d(1, 1), Eigen::Vector2d(-4, -5));
    c.yaw.design = c.altitude.design;
    c.lateral_x.design = ParametricDesign::scalar(Eigen::RowVector4d(1, 1, 1, 1), Eigen::Vector4d(-5, -6, -7, -8));
    c.lateral_y.design = c.lateral_x.design;
    // At rest, 0.5 m from the spiral start (1, 0, 0).
    c.initial_state.x = 1.3;
    c.initial_state.y = 0.4;
    c.roea.sampling.lower = Eigen::Vector2d(-0.03, -0.1);
    c.roea.sampling.upper = Eigen::Vector2d(0.03, 0.1);
    return c;
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

// Walks a YAML mapping, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
public:
    Section(const YAML::Node& node, std::string path, const std::string& source)
        : node_(node), path_(std::move(path)), source_(source) {
        if (present() && !node_.IsMap()) fail(node_, path_ + ": expected a mapping");
    }

    [[nodiscard]] bool has(const std::string& key) {
        seen_.insert(key);
        return present() && std::as_const(node_)[key];
    }

    YAML::Node get(const std::string& key) {
        return has(key) ? std::as_const(node_)[key] : YAML::Node(YAML::NodeType::Undefined);
    }

    [[nodiscard]] bool present() const { return node_.IsDefined() && !node_.IsNull(); }

    double number(const std::string& key, double fallback) {
        const YAML::Node n = get(key);
        if (!n) return fallback;
        return scalar<double>(n, key);
    }

    template <typename T>
    T scalar(const YAML::Node& n, const std::string& key) {
        if (!n.IsScalar()) fail(n, qualified(key) + ": expected a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::BadConversion&) {
            fail(n, qualified(key) + ": cannot parse '" + n.Scalar() + "'");
        }
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const YAML::Node n = get(key);
        return n ? scalar<std::string>(n, key) : fallback;
    }

    Eigen::VectorXd vector(const std::string& key, const Eigen::VectorXd& fallback, Eigen::Index expected = -1) {
        const YAML::Node n = get(key);
        if (!n) return fallback;
        if (!n.IsSequence()) fail(n, qualified(key) + ": expected a list of numbers");
        if (expected >= 0 && static_cast<Eigen::Index>(n.size()) != expected) {
            fail(n, qualified(key) + ": expected " + std::to_string(expected) + " entries");
        }
        Eigen::VectorXd v(static_cast<Eigen::Index>(n.size()));
        for (std::size_t i = 0; i < n.size(); ++i) v(static_cast<Eigen::Index>(i)) = scalar<double>(n[i], key);
        return v;
    }

    Box box(const std::string& key, const Box& fallback) {
        if (!has(key)) return fallback;
        const Eigen::VectorXd v = vector(key, {}, 2);
        return {v(0), v(1)};
    }

    Section child(const std::string& key) { return Section(get(key), qualified(key), source_); }

    void reject_unknown() const {
        if (!present()) return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.contains(key)) fail(kv.first, "unknown key '" + qualified(key) + "'");
        }
    }

    [[noreturn]] void fail(const YAML::Node& n, const std::string& message) const {
        throw ConfigError(source_, line_of(n), message);
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError(source_, present() ? line_of(node_) : 0, message);
    }

    [[nodiscard]] std::string qualified(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    [[nodiscard]] const YAML::Node& node() const { return node_; }

private:
    YAML::Node node_;
    std::string path_;
    const std::string& source_;
    std::set<std::string> seen_;
};

// Runs a validator, turning std::invalid_argument into a ConfigError at the
// line of `anchor`.
template <typename Fn>
void validated(const Section& anchor, Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        anchor.fail(e.what());
    }
}

void read_channel(Section& parent, const std::string& key, ChannelDesign& out, int order) {
    if (!parent.has(key)) return;
    Section s = parent.child(key);
    const bool has_gains = s.has("gains");
    const bool has_design = s.has("Z") || s.has("F");
    if (has_gains && has_design) s.fail(s.qualified("gains") + ": give either gains or Z/F, not both");
    if (has_gains) {
        out.design.reset();
        out.explicit_gains = s.vector("gains", {}, order).transpose();
    } else if (has_design) {
        const Eigen::VectorXd z = s.vector("Z", out.design ? Eigen::VectorXd(out.design->Z.row(0).transpose())
                                                           : Eigen::VectorXd::Ones(order), order);
        const Eigen::VectorXd f = s.vector("F", out.design ? out.design->poles() : Eigen::VectorXd(), order);
        out.design = ParametricDesign::scalar(z.transpose(), f);
        out.explicit_gains.resize(0);
        validated(s, [&] { out.design->validate(); });
    }
    s.reject_unknown();
}

ExperimentConfig parse_root(const YAML::Node& root, const std::string& source) {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    if (root.IsNull()) return cfg;
    Section top(root, "", source);

    if (top.has("mode")) {
        const std::string m = top.text("mode", "");
        cfg.mode = parse_mode(m);
        if (!cfg.mode) top.fail(top.get("mode"), "mode: expected synthesize | simulate | track | roea");
    }

    {
        Section s = top.child("quadrotor");
        auto& q = cfg.quadrotor;
        q.mass = s.number("mass", q.mass);
        q.gravity = s.number("gravity", q.gravity);
        q.jx = s.number("jx", q.jx);
        q.jy = s.number("jy", q.jy);
        q.jz = s.number("jz", q.jz);
        s.reject_unknown();
        validated(s, [&] { q.validate(); });
    }
    {
        Section s = top.child("actuator_limits");
        auto& a = cfg.actuator_limits;
        a.thrust_min = s.number("thrust_min", a.thrust_min);
        a.thrust_max = s.number("thrust_max", a.thrust_max);
        a.torque_min = s.number("torque_min", a.torque_min);
        a.torque_max = s.number("torque_max", a.torque_max);
        s.reject_unknown();
        validated(s, [&] { a.validate(); });
    }
    {
        Section s = top.child("virtual_input_constraints");
        auto& c = cfg.constraints;
        c.u0 = s.box("u0", c.u0);
        c.u0_dot = s.box("u0_dot", c.u0_dot);
        c.u0_ddot = s.box("u0_ddot", c.u0_ddot);
        c.u1 = s.box("u1", c.u1);
        c.u2_first = s.box("u2_1", c.u2_first);
        c.u2_second = s.box("u2_2", c.u2_second);
        s.reject_unknown();
        validated(s, [&] { c.validate(); });
    }
    {
        Section s = top.child("design");
        read_channel(s, "altitude", cfg.altitude, 2);
        read_channel(s, "yaw", cfg.yaw, 2);
        read_channel(s, "lateral_x", cfg.lateral_x, 4);
        read_channel(s, "lateral_y", cfg.lateral_y, 4);
        s.reject_unknown();
    }
    {
        Section s = top.child("trajectory");
        auto& t = cfg.trajectory;
        t.radius = s.number("radius", t.radius);
        t.omega = s.number("omega", t.omega);
        t.climb_rate = s.number("climb_rate", t.climb_rate);
        t.center = s.vector("center", t.center, 3);
        t.yaw_amplitude = s.number("yaw_amplitude", t.yaw_amplitude);
        t.yaw_rate = s.number("yaw_rate", t.yaw_rate);
        s.reject_unknown();
        validated(s, [&] { t.validate(); });
    }
    {
        Section s = top.child("setpoint");
        const double x = s.number("x", cfg.setpoint.lateral[0](0));
        const double y = s.number("y", cfg.setpoint.lateral[0](1));
        const double z = s.number("z", cfg.setpoint.z[0]);
        const double psi = s.number("psi", cfg.setpoint.psi[0]);
        cfg.setpoint = constant_reference(z, psi, Eigen::Vector2d(x, y));
        s.reject_unknown();
    }
    {
        Section s = top.child("initial_state");
        auto& st = cfg.initial_state;
        const Eigen::VectorXd pos = s.vector("position", st.position(), 3);
        const Eigen::VectorXd vel = s.vector("velocity", st.velocity(), 3);
        const Eigen::VectorXd att = s.vector("attitude", st.attitude(), 3);
        const Eigen::VectorXd rates = s.vector("body_rates", st.body_rates(), 3);
        st = {pos(0), pos(1), pos(2), vel(0), vel(1), vel(2), att(0), att(1), att(2), rates(0), rates(1), rates(2)};
        s.reject_unknown();
        if (!is_interior(st)) s.fail("initial_state.attitude: roll and pitch must lie inside (-pi/2, pi/2)");
    }
    {
        Section s = top.child("simulation");
        auto& sim = cfg.simulation;
        sim.horizon = s.number("horizon", sim.horizon);
        sim.dt = s.number("dt", sim.dt);
        const std::string hold = s.text("input_hold", "zero_order");
        if (hold == "zero_order") {
            sim.hold = InputHold::zero_order;
        } else if (hold == "per_stage") {
            sim.hold = InputHold::per_stage;
        } else {
            s.fail(s.get("input_hold"), "simulation.input_hold: expected zero_order | per_stage");
        }
        const std::string policy = s.text("on_singular", "abort");
        if (policy == "abort") {
            cfg.on_singular = SingularPolicy::abort;
        } else if (policy == "hold_command") {
            cfg.on_singular = SingularPolicy::hold_command;
        } else {
            s.fail(s.get("on_singular"), "simulation.on_singular: expected abort | hold_command");
        }
        s.reject_unknown();
        if (!(sim.horizon > 0.0)) s.fail("simulation.horizon must be positive");
        if (!(sim.dt > 0.0) || sim.dt > sim.horizon) s.fail("simulation.dt must be positive and below the horizon");
    }
    {
        Section s = top.child("summary");
        cfg.summary.tail_window = s.number("tail_window", cfg.summary.tail_window);
        cfg.summary.settle_time = s.number("settle_time", cfg.summary.settle_time);
        s.reject_unknown();
        if (!(cfg.summary.tail_window > 0.0)) s.fail("summary.tail_window must be positive");
        if (!(cfg.summary.settle_time >= 0.0)) s.fail("summary.settle_time must be non-negative");
    }
    {
        Section s = top.child("roea");
        auto& r = cfg.roea;
        if (s.has("subsystem")) {
            const std::string name = s.text("subsystem", "");
            if (name == "altitude") {
                r.subsystem = Subsystem::altitude;
            } else if (name == "yaw") {
                r.subsystem = Subsystem::yaw;
            } else if (name == "lateral") {
                r.subsystem = Subsystem::lateral;
            } else {
                s.fail(s.get("subsystem"), "roea.subsystem: expected altitude | yaw | lateral");
            }
        }
        const std::string kind = s.text("sampling", "grid");
        if (kind == "grid") {
            r.sampling.kind = SamplingSpec::Kind::grid;
        } else if (kind == "uniform_random") {
            r.sampling.kind = SamplingSpec::Kind::uniform_random;
        } else {
            s.fail(s.get("sampling"), "roea.sampling: expected grid | uniform_random");
        }
        const Eigen::Index dim = state_dimension(r.subsystem);
        r.sampling.lower = s.vector("lower", r.sampling.lower, dim);
        r.sampling.upper = s.vector("upper", r.sampling.upper, dim);
        if (s.has("points_per_axis")) r.sampling.points_per_axis = s.scalar<int>(s.get("points_per_axis"), "points_per_axis");
        if (s.has("count")) r.sampling.count = s.scalar<std::size_t>(s.get("count"), "count");
        if (s.has("seed")) r.sampling.seed = s.scalar<std::uint64_t>(s.get("seed"), "seed");
        r.check.horizon = s.number("horizon", r.check.horizon);
        r.check.dt = s.number("dt", r.check.dt);
        r.check.boundary_band = s.number("boundary_band", r.check.boundary_band);
        s.reject_unknown();
        validated(s, [&] {
            r.sampling.validate(static_cast<int>(dim));
            (void)sample_count(r.check.horizon, r.check.dt);
        });
    }
    {
        Section s = top.child("output");
        auto& o = cfg.output;
        o.directory = s.text("directory", o.directory.string());
        o.gains_file = s.text("gains_file", o.gains_file);
        o.trajectory_csv = s.text("trajectory_csv", o.trajectory_csv);
        o.summary_file = s.text("summary_file", o.summary_file);
        o.plot_script = s.text("plot_script", o.plot_script);
        o.roea_csv = s.text("roea_csv", o.roea_csv);
        s.reject_unknown();
    }
    top.reject_unknown();
    return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(source, e.mark.is_null() ? 0 : e.mark.line + 1, e.msg);
    }
    if (!root.IsNull() && !root.IsMap()) throw ConfigError(source, 1, "top level must be a mapping");
    return parse_root(root, source);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::filesystem::path resolve_config_path(const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path direct(name);
    if (fs::is_regular_file(direct)) return direct;
    fs::path with_ext = direct;
    with_ext += ".yaml";
    if (fs::is_regular_file(with_ext)) return with_ext;
    const fs::path shipped = fs::path(UCFAS_CONFIG_DIR) / (name + ".yaml");
    if (direct.is_relative() && fs::is_regular_file(shipped)) return shipped;
    return direct;
}

}  // namespace ucfas

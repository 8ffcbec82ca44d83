#include "ucfas/feasibility.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ucfas/errors.hpp"
#include "ucfas/plant.hpp"
#include "ucfas/synthesis.hpp"
#include "ucfas/trajectory.hpp"

namespace ucfas {

const char* to_string(Subsystem s) {
    switch (s) {
        case Subsystem::altitude: return "altitude";
        case Subsystem::yaw: return "yaw";
        case Subsystem::lateral: return "lateral";
    }
    return "unknown";
}

int state_dimension(Subsystem s) { return s == Subsystem::lateral ? 8 : 2; }

const char* to_string(Membership m) {
    switch (m) {
        case Membership::member: return "member";
        case Membership::non_member: return "non_member";
        case Membership::marginal: return "marginal";
    }
    return "unknown";
}

namespace {

Eigen::VectorXd linear_rk4(const Eigen::MatrixXd& c, const Eigen::VectorXd& x, double dt) {
    const Eigen::VectorXd k1 = c * x;
    const Eigen::VectorXd k2 = c * (x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = c * (x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = c * (x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Worst margin of a sample and the constraint that attains it.
struct SampleMargin {
    double margin = std::numeric_limits<double>::infinity();
    const char* constraint = "";

    void take(double m, const char* name) {
        if (m < margin) {
            margin = m;
            constraint = name;
        }
    }
};

// Accumulates per-sample margins into a MembershipEntry. Returns false once
// the outcome is settled as non-member and the scan may stop.
class MarginScan {
public:
    MarginScan(Eigen::VectorXd x0, double band) : band_(band) {
        entry_.initial = std::move(x0);
        entry_.worst_margin = std::numeric_limits<double>::infinity();
    }

    bool add(double t, const SampleMargin& m) {
        if (m.margin < entry_.worst_margin) entry_.worst_margin = m.margin;
        if (m.margin < 0.0 && !entry_.first_violation) {
            entry_.first_violation = Violation{t, m.constraint};
        }
        return !(m.margin <= -band_);
    }

    void fail(double t, const std::string& reason) {
        entry_.worst_margin = -std::numeric_limits<double>::infinity();
        if (!entry_.first_violation) entry_.first_violation = Violation{t, reason};
    }

    MembershipEntry finish() {
        if (entry_.worst_margin >= band_) {
            entry_.status = Membership::member;
        } else if (entry_.worst_margin <= -band_) {
            entry_.status = Membership::non_member;
        } else {
            entry_.status = Membership::marginal;
        }
        return std::move(entry_);
    }

private:
    double band_;
    MembershipEntry entry_;
};

MembershipEntry check_linear(Subsystem sub, const Eigen::VectorXd& x0, const ControllerGains& gains,
                             const InputConstraintSet& cs, const QuadrotorParams& params,
                             const CheckOptions& opt) {
    const Eigen::RowVector2d a = sub == Subsystem::altitude ? gains.altitude : gains.yaw;
    const Eigen::MatrixXd c = companion(Eigen::MatrixXd(a), 1);
    const std::size_t n = sample_count(opt.horizon, opt.dt);

    const auto margin_at = [&](const Eigen::VectorXd& x) {
        SampleMargin m;
        if (sub == Subsystem::altitude) {
            // u0 = -A x + g, and by the closed loop u0' = -A C x, u0'' = -A C^2 x.
            const Eigen::VectorXd xd = c * x;
            m.take(cs.u0.margin(-a.dot(x) + params.gravity), "u0");
            m.take(cs.u0_dot.margin(-a.dot(xd)), "u0_dot");
            m.take(cs.u0_ddot.margin(-a.dot(c * xd)), "u0_ddot");
        } else {
            m.take(cs.u1.margin(-a.dot(x)), "u1");
        }
        return m;
    };

    MarginScan scan(x0, opt.boundary_band);
    Eigen::VectorXd x = x0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!scan.add(static_cast<double>(k) * opt.dt, margin_at(x))) break;
        x = linear_rk4(c, x, opt.dt);
    }
    return scan.finish();
}

MembershipEntry check_lateral(const Eigen::VectorXd& x0, const ControllerGains& gains,
                              const InputConstraintSet& cs, const QuadrotorParams& params,
                              const CheckOptions& opt) {
    MarginScan scan(x0, opt.boundary_band);
    PlantState initial;
    try {
        initial = lateral_initial_state(x0, params);
    } catch (const SingularKinematicsError& e) {
        scan.fail(0.0, std::string("internal: ") + e.what());
        return scan.finish();
    }

    const ReferenceSample ref = constant_reference(0.0, 0.0, Eigen::Vector2d::Zero());
    // Actuator saturation is plant hardware, not part of the feasibility
    // sets, so the check runs with unbounded actuators.
    const ActuatorLimits unbounded{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                                   -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    const Controller controller = [&](const PlantState& s, double) {
        const ControlStepResult step = control_step(s, ref, gains, params, unbounded);
        ControlSample out;
        out.command = step.raw;
        out.virtual_inputs = step.virtual_inputs;
        out.reference = ref;
        return out;
    };
    SimulationOptions sim;
    sim.horizon = opt.horizon;
    sim.dt = opt.dt;
    sim.hold = InputHold::per_stage;
    sim.truncate_on_error = true;
    const TrajectoryLog log = simulate(initial, controller, unbounded, params, sim);

    for (std::size_t k = 0; k < log.size(); ++k) {
        SampleMargin m;
        m.take(cs.u2_first.margin(log.virtual_inputs[k].u2(0)), "u2_1");
        m.take(cs.u2_second.margin(log.virtual_inputs[k].u2(1)), "u2_2");
        if (!scan.add(log.time[k], m)) return scan.finish();
    }
    if (log.failure) scan.fail(log.failure->time, "internal: " + log.failure->message);
    return scan.finish();
}

}  // namespace

std::vector<Eigen::VectorXd> linear_response(const Eigen::MatrixXd& c, const Eigen::VectorXd& x0, double horizon,
                                             double dt) {
    if (c.rows() != c.cols() || c.rows() != x0.size()) {
        throw std::invalid_argument("linear_response: dimension mismatch");
    }
    const std::size_t n = sample_count(horizon, dt);
    std::vector<Eigen::VectorXd> path;
    path.reserve(n);
    path.push_back(x0);
    for (std::size_t k = 1; k < n; ++k) path.push_back(linear_rk4(c, path.back(), dt));
    return path;
}

PlantState lateral_initial_state(const Eigen::Matrix<double, 8, 1>& chain, const QuadrotorParams& params) {
    const double g = params.gravity;
    // With psi = 0: f_x = tan(theta), f_y = -tan(phi) sec(theta).
    const double fx = chain(2) / g, fy = chain(6) / g;
    PlantState s;
    s.x = chain(0);
    s.vx = chain(1);
    s.y = chain(4);
    s.vy = chain(5);
    s.theta = std::atan(fx);
    s.phi = std::atan(-fy * std::cos(s.theta));

    // X''' = g [Gamma_1 Gamma_2] [phi' theta']^T with psi' = 0 and u0' = 0.
    const GammaPair gp = gamma(s.attitude());
    Eigen::Matrix2d block;
    block << gp.x(0), gp.x(1), gp.y(0), gp.y(1);
    const Eigen::Vector2d rates = block.inverse() * Eigen::Vector2d(chain(3) / g, chain(7) / g);
    const Eigen::Vector3d body = euler_matrix_inverse(s.phi, s.theta) * Eigen::Vector3d(rates(0), rates(1), 0.0);
    s.p = body(0);
    s.q = body(1);
    s.r = body(2);
    return s;
}

MembershipEntry check_membership(Subsystem subsystem, const Eigen::VectorXd& x0, const ControllerGains& gains,
                                 const InputConstraintSet& constraints, const QuadrotorParams& params,
                                 const CheckOptions& options) {
    if (x0.size() != state_dimension(subsystem)) {
        std::ostringstream msg;
        msg << to_string(subsystem) << " initial condition must have dimension " << state_dimension(subsystem);
        throw std::invalid_argument(msg.str());
    }
    if (subsystem == Subsystem::lateral) return check_lateral(x0, gains, constraints, params, options);
    return check_linear(subsystem, x0, gains, constraints, params, options);
}

void SamplingSpec::validate(int dimension) const {
    if (lower.size() != dimension || upper.size() != dimension) {
        throw std::invalid_argument("sampling bounds must match the subsystem dimension " +
                                    std::to_string(dimension));
    }
    if (!lower.allFinite() || !upper.allFinite() || (upper - lower).minCoeff() < 0.0) {
        throw std::invalid_argument("sampling bounds must be finite with lower <= upper");
    }
    if (kind == Kind::grid && points_per_axis < 1) {
        throw std::invalid_argument("sampling.points_per_axis must be at least 1");
    }
    if (kind == Kind::uniform_random && count == 0) {
        throw std::invalid_argument("sampling.count must be positive");
    }
}

std::vector<Eigen::VectorXd> generate_samples(const SamplingSpec& spec) {
    const Eigen::Index dim = spec.lower.size();
    std::vector<Eigen::VectorXd> out;
    if (spec.kind == SamplingSpec::Kind::uniform_random) {
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        out.reserve(spec.count);
        for (std::size_t i = 0; i < spec.count; ++i) {
            Eigen::VectorXd x(dim);
            for (Eigen::Index d = 0; d < dim; ++d) x(d) = spec.lower(d) + unit(rng) * (spec.upper(d) - spec.lower(d));
            out.push_back(std::move(x));
        }
        return out;
    }
    const auto per_axis = static_cast<std::size_t>(spec.points_per_axis);
    std::size_t total = 1;
    for (Eigen::Index d = 0; d < dim; ++d) total *= per_axis;
    out.reserve(total);
    // First axis varies slowest.
    for (std::size_t i = 0; i < total; ++i) {
        Eigen::VectorXd x(dim);
        std::size_t rem = i;
        for (Eigen::Index d = dim - 1; d >= 0; --d) {
            const std::size_t idx = rem % per_axis;
            rem /= per_axis;
            x(d) = per_axis == 1 ? spec.lower(d)
                                 : spec.lower(d) + (spec.upper(d) - spec.lower(d)) * static_cast<double>(idx) /
                                                       static_cast<double>(per_axis - 1);
        }
        out.push_back(std::move(x));
    }
    return out;
}

double RoeaReport::member_fraction() const {
    return entries.empty() ? 0.0 : static_cast<double>(members) / static_cast<double>(entries.size());
}

namespace {

void validate_inputs(Subsystem subsystem, const InputConstraintSet& constraints, const SamplingSpec& sampling,
                     const CheckOptions& options) {
    constraints.validate();
    sampling.validate(state_dimension(subsystem));
    (void)sample_count(options.horizon, options.dt);
    if (!(options.boundary_band >= 0.0)) throw std::invalid_argument("boundary band must be non-negative");
}

RoeaReport summarize(Subsystem subsystem, std::vector<MembershipEntry> entries) {
    RoeaReport report;
    report.subsystem = subsystem;
    report.entries = std::move(entries);
    for (const auto& e : report.entries) {
        switch (e.status) {
            case Membership::member:
                ++report.members;
                if (!report.member_bounds) {
                    report.member_bounds.emplace(e.initial, e.initial);
                } else {
                    report.member_bounds->first = report.member_bounds->first.cwiseMin(e.initial);
                    report.member_bounds->second = report.member_bounds->second.cwiseMax(e.initial);
                }
                break;
            case Membership::non_member: ++report.non_members; break;
            case Membership::marginal: ++report.marginal; break;
        }
    }
    return report;
}

}  // namespace

RoeaReport estimate_roea(Subsystem subsystem, const ControllerGains& gains, const InputConstraintSet& constraints,
                         const QuadrotorParams& params, const SamplingSpec& sampling, const CheckOptions& options) {
    validate_inputs(subsystem, constraints, sampling, options);
    const std::vector<Eigen::VectorXd> samples = generate_samples(sampling);
    std::vector<MembershipEntry> entries(samples.size());
    std::exception_ptr error;
    const auto n = static_cast<long long>(samples.size());

#pragma omp parallel for schedule(dynamic, 4)
    for (long long i = 0; i < n; ++i) {
        try {
            entries[static_cast<std::size_t>(i)] =
                check_membership(subsystem, samples[static_cast<std::size_t>(i)], gains, constraints, params, options);
        } catch (...) {
#pragma omp critical(ucfas_roea_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return summarize(subsystem, std::move(entries));
}

RoeaReport estimate_roea_serial(Subsystem subsystem, const ControllerGains& gains,
                                const InputConstraintSet& constraints, const QuadrotorParams& params,
                                const SamplingSpec& sampling, const CheckOptions& options) {
    validate_inputs(subsystem, constraints, sampling, options);
    std::vector<MembershipEntry> entries;
    for (const auto& x0 : generate_samples(sampling)) {
        entries.push_back(check_membership(subsystem, x0, gains, constraints, params, options));
    }
    return summarize(subsystem, std::move(entries));
}

bool JointReport::member() const {
    return altitude.status == Membership::member && yaw.status == Membership::member &&
           lateral.status == Membership::member;
}

JointReport check_joint(const JointInitialCondition& x0, const ControllerGains& gains,
                        const InputConstraintSet& constraints, const QuadrotorParams& params,
                        const CheckOptions& options) {
    return {check_membership(Subsystem::altitude, x0.altitude, gains, constraints, params, options),
            check_membership(Subsystem::yaw, x0.yaw, gains, constraints, params, options),
            check_membership(Subsystem::lateral, x0.lateral, gains, constraints, params, options)};
}

}  // namespace ucfas

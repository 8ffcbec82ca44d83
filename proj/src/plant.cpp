#include "ucfas/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ucfas {

void QuadrotorParams::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"mass", mass}, {"gravity", gravity}, {"jx", jx}, {"jy", jy}, {"jz", jz}};
    for (const auto& [name, value] : fields) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw std::invalid_argument(std::string("quadrotor.") + name + " must be positive and finite");
        }
    }
}

Vector12d PlantState::to_vector() const {
    Vector12d v;
    v << x, y, z, vx, vy, vz, phi, theta, psi, p, q, r;
    return v;
}

PlantState PlantState::from_vector(const Vector12d& v) {
    return {v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8), v(9), v(10), v(11)};
}

void ActuatorLimits::validate() const {
    if (!(thrust_min < thrust_max)) {
        throw std::invalid_argument("actuator_limits.thrust_max must exceed actuator_limits.thrust_min");
    }
    if (!(torque_min < torque_max)) {
        throw std::invalid_argument("actuator_limits.torque_max must exceed actuator_limits.torque_min");
    }
}

bool is_interior(double phi, double theta, double margin) {
    const double bound = std::numbers::pi / 2 - margin;
    return std::abs(phi) < bound && std::abs(theta) < bound;
}

bool is_interior(const PlantState& s, double margin) { return is_interior(s.phi, s.theta, margin); }

PlantState plant_derivative(const PlantState& s, const PhysicalInput& u, const QuadrotorParams& params) {
    if (!is_interior(s)) {
        std::ostringstream msg;
        msg << "attitude outside interior region (phi=" << s.phi << ", theta=" << s.theta << ")";
        throw SingularKinematicsError(msg.str(), s);
    }
    const double sphi = std::sin(s.phi), cphi = std::cos(s.phi);
    const double sth = std::sin(s.theta), cth = std::cos(s.theta), tth = sth / cth;
    const double spsi = std::sin(s.psi), cpsi = std::cos(s.psi);
    const double thrust_acc = u.thrust / params.mass;

    PlantState d;
    d.x = s.vx;
    d.y = s.vy;
    d.z = s.vz;
    d.vx = thrust_acc * (cphi * sth * cpsi + sphi * spsi);
    d.vy = thrust_acc * (cphi * sth * spsi - sphi * cpsi);
    d.vz = thrust_acc * cphi * cth - params.gravity;
    d.phi = s.p + s.q * sphi * tth - s.r * cphi * tth;
    d.theta = s.q * cphi + s.r * sphi;
    d.psi = -s.q * sphi / cth + s.r * cphi / cth;
    d.p = (params.jy - params.jz) / params.jx * s.q * s.r + u.tau_phi / params.jx;
    d.q = (params.jz - params.jx) / params.jy * s.p * s.r + u.tau_theta / params.jy;
    d.r = (params.jx - params.jy) / params.jz * s.p * s.q + u.tau_psi / params.jz;
    return d;
}

PhysicalInput saturate(const PhysicalInput& u, const ActuatorLimits& lim) {
    return {std::clamp(u.thrust, lim.thrust_min, lim.thrust_max),
            std::clamp(u.tau_phi, lim.torque_min, lim.torque_max),
            std::clamp(u.tau_theta, lim.torque_min, lim.torque_max),
            std::clamp(u.tau_psi, lim.torque_min, lim.torque_max)};
}

namespace {

// Generic RK4 over the 12-vector; `field` maps (state, stage time offset) to
// the derivative vector.
template <typename Field>
Vector12d rk4(const Vector12d& x, double dt, Field&& field) {
    const Vector12d k1 = field(x, 0.0);
    const Vector12d k2 = field(x + 0.5 * dt * k1, 0.5 * dt);
    const Vector12d k3 = field(x + 0.5 * dt * k2, 0.5 * dt);
    const Vector12d k4 = field(x + dt * k3, dt);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

PlantState step_rk4(const PlantState& state, const PhysicalInput& input, const QuadrotorParams& params,
                    double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
    const auto field = [&](const Vector12d& x, double) {
        return plant_derivative(PlantState::from_vector(x), input, params).to_vector();
    };
    return PlantState::from_vector(rk4(state.to_vector(), dt, field));
}

void TrajectoryLog::reserve(std::size_t n) {
    time.reserve(n);
    state.reserve(n);
    raw_input.reserve(n);
    applied_input.reserve(n);
    virtual_inputs.reserve(n);
    reference.reserve(n);
    position_error.reserve(n);
    yaw_error.reserve(n);
    violation_flags.reserve(n);
    infeasible.reserve(n);
}

std::size_t sample_count(double horizon, double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("horizon and dt must be positive");
    }
    // Tolerate representation error in horizon/dt, e.g. 100 / 1e-3.
    return static_cast<std::size_t>(std::floor(horizon / dt + 1e-9)) + 1;
}

namespace {

void append_sample(TrajectoryLog& log, double t, const PlantState& s, const ControlSample& c,
                   const PhysicalInput& applied) {
    log.time.push_back(t);
    log.state.push_back(s);
    log.raw_input.push_back(c.command);
    log.applied_input.push_back(applied);
    log.virtual_inputs.push_back(c.virtual_inputs);
    log.reference.push_back(c.reference);
    const auto& ref = c.reference;
    const double ex = s.x - ref.lateral[0](0);
    const double ey = s.y - ref.lateral[0](1);
    const double ez = s.z - ref.z[0];
    log.position_error.push_back(std::sqrt(ex * ex + ey * ey + ez * ez));
    log.yaw_error.push_back(std::abs(s.psi - ref.psi[0]));
    log.violation_flags.push_back(c.violation_flags);
    log.infeasible.push_back(c.infeasible ? 1 : 0);
}

std::string at_time(double t, const char* what) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "t=" << t << " s: " << what;
    return msg.str();
}

}  // namespace

TrajectoryLog simulate(const PlantState& initial, const Controller& controller, const ActuatorLimits& limits,
                       const QuadrotorParams& params, const SimulationOptions& options) {
    const std::size_t n = sample_count(options.horizon, options.dt);
    const double dt = options.dt;

    TrajectoryLog log;
    log.dt = dt;
    log.reserve(n);

    PlantState state = initial;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        try {
            const ControlSample sample = controller(state, t);
            const PhysicalInput applied = saturate(sample.command, limits);
            append_sample(log, t, state, sample, applied);
            if (k + 1 == n) break;

            if (options.hold == InputHold::zero_order) {
                state = step_rk4(state, applied, params, dt);
            } else {
                const auto field = [&](const Vector12d& x, double offset) {
                    const PlantState s = PlantState::from_vector(x);
                    const PhysicalInput u =
                        offset == 0.0 ? applied : saturate(controller(s, t + offset).command, limits);
                    return plant_derivative(s, u, params).to_vector();
                };
                state = PlantState::from_vector(rk4(state.to_vector(), dt, field));
            }
        } catch (const SingularKinematicsError& e) {
            if (!options.truncate_on_error) {
                throw SingularKinematicsError(at_time(t, e.what()), e.state(), t);
            }
            log.failure = SimulationFailure{t, e.what()};
            break;
        } catch (const NearSingularInputError& e) {
            if (!options.truncate_on_error) {
                throw NearSingularInputError(at_time(t, e.what()), e.determinant());
            }
            log.failure = SimulationFailure{t, e.what()};
            break;
        }
    }
    return log;
}

}  // namespace ucfas

#include "ucfas/fas_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ucfas/errors.hpp"
#include "ucfas/plant.hpp"

namespace ucfas {

namespace {

void require_pitch(double theta) {
    if (!(std::abs(theta) < std::numbers::pi / 2 - kAngleMargin)) {
        std::ostringstream msg;
        msg << "pitch " << theta << " rad at or beyond +/- pi/2";
        throw SingularKinematicsError(msg.str());
    }
}

void require_interior(double phi, double theta) {
    if (!is_interior(phi, theta)) {
        std::ostringstream msg;
        msg << "attitude (phi=" << phi << ", theta=" << theta << ") outside interior region";
        throw SingularKinematicsError(msg.str());
    }
}

// Trig values shared by f, Gamma and Gamma-dot.
struct Trig {
    double sphi, cphi, tphi, secphi;
    double sth, cth, tth, secth;
    double spsi, cpsi;

    explicit Trig(const Eigen::Vector3d& a) {
        require_interior(a(0), a(1));
        sphi = std::sin(a(0));
        cphi = std::cos(a(0));
        tphi = sphi / cphi;
        secphi = 1.0 / cphi;
        sth = std::sin(a(1));
        cth = std::cos(a(1));
        tth = sth / cth;
        secth = 1.0 / cth;
        spsi = std::sin(a(2));
        cpsi = std::cos(a(2));
    }
};

}  // namespace

Eigen::Matrix3d euler_matrix(double phi, double theta) {
    require_pitch(theta);
    const double s = std::sin(phi), c = std::cos(phi);
    const double t = std::tan(theta), ct = std::cos(theta);
    Eigen::Matrix3d m;
    // clang-format off
    m << 1.0, s * t,    -c * t,
         0.0, c,        s,
         0.0, -s / ct,  c / ct;
    // clang-format on
    return m;
}

Eigen::Matrix3d euler_matrix_inverse(double phi, double theta) {
    require_pitch(theta);
    const double s = std::sin(phi), c = std::cos(phi);
    const double st = std::sin(theta), ct = std::cos(theta);
    Eigen::Matrix3d m;
    // clang-format off
    m << 1.0, 0.0, st,
         0.0, c,   -s * ct,
         0.0, s,   c * ct;
    // clang-format on
    return m;
}

Eigen::Matrix3d euler_matrix_dot(double phi, double theta, double phi_dot, double theta_dot) {
    require_pitch(theta);
    const double s = std::sin(phi), c = std::cos(phi);
    const double t = std::tan(theta), ct = std::cos(theta), sec = 1.0 / ct;
    const double sec2 = sec * sec;
    Eigen::Matrix3d m;
    // clang-format off
    m << 0.0, c * t * phi_dot + s * sec2 * theta_dot,  s * t * phi_dot - c * sec2 * theta_dot,
         0.0, -s * phi_dot,                             c * phi_dot,
         0.0, -c * sec * phi_dot - s * t * sec * theta_dot,
                                                        -s * sec * phi_dot + c * t * sec * theta_dot;
    // clang-format on
    return m;
}

ThrustDirection thrust_direction(const Eigen::Vector3d& angles) {
    const Trig g(angles);
    return {g.tth * g.cpsi + g.tphi * g.secth * g.spsi, g.tth * g.spsi - g.tphi * g.secth * g.cpsi};
}

GammaPair gamma(const Eigen::Vector3d& angles) {
    const Trig g(angles);
    const double sec2phi = g.secphi * g.secphi;
    const double sec2th = g.secth * g.secth;
    GammaPair out;
    out.x << sec2phi * g.secth * g.spsi,
        sec2th * g.cpsi + g.tphi * g.secth * g.tth * g.spsi,
        -g.tth * g.spsi + g.tphi * g.secth * g.cpsi;
    out.y << -sec2phi * g.secth * g.cpsi,
        sec2th * g.spsi - g.tphi * g.secth * g.tth * g.cpsi,
        g.tth * g.cpsi + g.tphi * g.secth * g.spsi;
    return out;
}

GammaPair gamma_dot(const Eigen::Vector3d& angles, const Eigen::Vector3d& rates) {
    const Trig g(angles);
    const double dphi = rates(0), dth = rates(1), dpsi = rates(2);
    const double sec2phi = g.secphi * g.secphi;
    const double sec2th = g.secth * g.secth;
    const double sec3th = sec2th * g.secth;
    // d/dphi sec^2(phi) = 2 sec^2(phi) tan(phi), likewise for theta.
    const double a = sec2phi * g.secth;          // sec^2 phi sec theta
    const double b = g.tphi * g.secth * g.tth;   // tan phi sec theta tan theta
    const double c = g.tphi * g.secth;           // tan phi sec theta

    GammaPair out;
    out.x(0) = 2.0 * dphi * a * g.tphi * g.spsi + dth * a * g.tth * g.spsi + dpsi * a * g.cpsi;
    out.x(1) = 2.0 * dth * sec2th * g.tth * g.cpsi - dpsi * sec2th * g.spsi + dphi * a * g.tth * g.spsi +
               dth * b * g.tth * g.spsi + dth * g.tphi * sec3th * g.spsi + dpsi * b * g.cpsi;
    out.x(2) = -dth * sec2th * g.spsi - dpsi * g.tth * g.cpsi + dphi * a * g.cpsi + dth * b * g.cpsi -
               dpsi * c * g.spsi;

    out.y(0) = -2.0 * dphi * a * g.tphi * g.cpsi - dth * a * g.tth * g.cpsi + dpsi * a * g.spsi;
    out.y(1) = 2.0 * dth * sec2th * g.tth * g.spsi + dpsi * sec2th * g.cpsi - dphi * a * g.tth * g.cpsi -
               dth * b * g.tth * g.cpsi - dth * g.tphi * sec3th * g.cpsi + dpsi * b * g.spsi;
    out.y(2) = dth * sec2th * g.cpsi - dpsi * g.tth * g.spsi + dphi * a * g.spsi + dth * b * g.spsi +
               dpsi * c * g.cpsi;
    return out;
}

GammaRows gamma_rows(const Eigen::Vector3d& angles, const Eigen::Vector3d& rates) {
    return {gamma(angles), gamma_dot(angles, rates)};
}

Eigen::Vector2d lateral_drift(const Eigen::Vector3d& angles, const Eigen::Vector3d& rates,
                              const ThrustChain& th, double u1) {
    const ThrustDirection f = thrust_direction(angles);
    const GammaRows gr = gamma_rows(angles, rates);
    const auto row = [&](double fk, const Eigen::RowVector3d& g, const Eigen::RowVector3d& gd) {
        return th.u0_ddot * fk + (2.0 * th.u0_dot * g + th.u0 * gd).dot(rates) + th.u0 * g(2) * u1;
    };
    return {row(f.fx, gr.value.x, gr.rate.x), row(f.fy, gr.value.y, gr.rate.y)};
}

double lateral_input_det(const Eigen::Vector3d& angles, double u0) {
    require_interior(angles(0), angles(1));
    const double cth = std::cos(angles(1)), cphi = std::cos(angles(0));
    return u0 * u0 / (cth * cth * cth * cphi * cphi);
}

LateralInputMatrix lateral_input_matrix_unchecked(const Eigen::Vector3d& angles, double u0) {
    const GammaPair g = gamma(angles);
    LateralInputMatrix out;
    out.matrix << g.x(0), g.x(1), g.y(0), g.y(1);
    out.matrix *= u0;
    out.det_cofactor = out.matrix(0, 0) * out.matrix(1, 1) - out.matrix(0, 1) * out.matrix(1, 0);
    out.det_closed_form = lateral_input_det(angles, u0);
    return out;
}

LateralInputMatrix lateral_input_matrix(const Eigen::Vector3d& angles, double u0) {
    LateralInputMatrix out = lateral_input_matrix_unchecked(angles, u0);
    if (!(std::abs(out.det_closed_form) >= kInputMatrixDetTolerance)) {
        std::ostringstream msg;
        msg << "lateral input matrix near-singular (u0=" << u0 << ", det=" << out.det_closed_form << ")";
        throw NearSingularInputError(msg.str(), out.det_closed_form);
    }
    return out;
}

Eigen::Vector2d lateral_fourth_derivative(const Eigen::Vector3d& angles, const Eigen::Vector3d& rates,
                                          const ThrustChain& thrust, double u1, const Eigen::Vector2d& u2) {
    return lateral_drift(angles, rates, thrust, u1) + lateral_input_matrix_unchecked(angles, thrust.u0).matrix * u2;
}

Eigen::Vector3d gyroscopic_term(const Eigen::Vector3d& w, const QuadrotorParams& pr) {
    return {(pr.jy - pr.jz) / pr.jx * w(1) * w(2), (pr.jz - pr.jx) / pr.jy * w(0) * w(2),
            (pr.jx - pr.jy) / pr.jz * w(0) * w(1)};
}

PhysicalInput virtual_to_physical(const VirtualInputs& virt, const PlantState& s, const QuadrotorParams& pr) {
    require_interior(s.phi, s.theta);
    const Eigen::Vector3d body = s.body_rates();
    const Eigen::Matrix3d m = euler_matrix(s.phi, s.theta);
    const Eigen::Vector3d euler_rates = m * body;
    const Eigen::Matrix3d m_dot = euler_matrix_dot(s.phi, s.theta, euler_rates(0), euler_rates(1));
    const Eigen::Vector3d body_acc =
        euler_matrix_inverse(s.phi, s.theta) * (virt.angular() - m_dot * body) - gyroscopic_term(body, pr);
    return {pr.mass * virt.thrust.u0 / (std::cos(s.phi) * std::cos(s.theta)), pr.jx * body_acc(0),
            pr.jy * body_acc(1), pr.jz * body_acc(2)};
}

VirtualPair physical_to_virtual(const PhysicalInput& in, const PlantState& s, const QuadrotorParams& pr) {
    require_interior(s.phi, s.theta);
    const Eigen::Vector3d body = s.body_rates();
    const Eigen::Matrix3d m = euler_matrix(s.phi, s.theta);
    const Eigen::Vector3d euler_rates = m * body;
    const Eigen::Matrix3d m_dot = euler_matrix_dot(s.phi, s.theta, euler_rates(0), euler_rates(1));
    const Eigen::Vector3d torque_acc(in.tau_phi / pr.jx, in.tau_theta / pr.jy, in.tau_psi / pr.jz);
    VirtualPair out;
    out.u0 = in.thrust / pr.mass * std::cos(s.phi) * std::cos(s.theta);
    out.u_bar = m_dot * body + m * (gyroscopic_term(body, pr) + torque_acc);
    return out;
}

std::string constraint_name(ConstraintFlag flag) {
    switch (flag) {
        case kViolU0: return "u0";
        case kViolU0Dot: return "u0_dot";
        case kViolU0Ddot: return "u0_ddot";
        case kViolU1: return "u1";
        case kViolU2First: return "u2_1";
        case kViolU2Second: return "u2_2";
    }
    return "unknown";
}

void InputConstraintSet::validate() const {
    const std::pair<const char*, const Box*> boxes[] = {{"u0", &u0},       {"u0_dot", &u0_dot},
                                                        {"u0_ddot", &u0_ddot}, {"u1", &u1},
                                                        {"u2_1", &u2_first}, {"u2_2", &u2_second}};
    for (const auto& [name, box] : boxes) {
        if (!(box->lower < box->upper)) {
            throw std::invalid_argument(std::string("virtual_input_constraints.") + name +
                                        ": lower bound must be below upper bound");
        }
    }
    if (u0.contains(0.0)) {
        throw std::invalid_argument("virtual_input_constraints.u0: box must exclude zero");
    }
}

std::uint32_t InputConstraintSet::violations(const VirtualInputs& v) const {
    std::uint32_t flags = 0;
    if (!u0.contains(v.thrust.u0) || v.thrust.u0 == 0.0) flags |= kViolU0;
    if (!u0_dot.contains(v.thrust.u0_dot)) flags |= kViolU0Dot;
    if (!u0_ddot.contains(v.thrust.u0_ddot)) flags |= kViolU0Ddot;
    if (!u1.contains(v.u1)) flags |= kViolU1;
    if (!u2_first.contains(v.u2(0))) flags |= kViolU2First;
    if (!u2_second.contains(v.u2(1))) flags |= kViolU2Second;
    return flags;
}

}  // namespace ucfas

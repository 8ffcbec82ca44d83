#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ucfas/control.hpp"
#include "ucfas/fas_model.hpp"
#include "ucfas/types.hpp"

// Numerical feasibility and region-of-exponential-attraction (RoEA) checks.
//
// A subsystem initial condition is a member when the closed-loop response
// started there keeps every constrained virtual input inside its box over
// the check horizon. Altitude and yaw are checked on their linear closed
// loops; the lateral subsystem is checked by simulating the full nonlinear
// loop, since its input depends on attitude and the thrust chain.

namespace ucfas {

enum class Subsystem { altitude, yaw, lateral };

[[nodiscard]] const char* to_string(Subsystem s);
[[nodiscard]] int state_dimension(Subsystem s);

struct CheckOptions {
    double horizon = 10.0;
    double dt = 1e-3;
    double boundary_band = 1e-6;
};

enum class Membership { member, non_member, marginal };

[[nodiscard]] const char* to_string(Membership m);

struct Violation {
    double time = 0;
    std::string constraint;
};

struct MembershipEntry {
    Eigen::VectorXd initial;
    Membership status = Membership::member;
    double worst_margin = 0;
    std::optional<Violation> first_violation;
};

/// Samples of x' = C x by fixed-step RK4; floor(horizon/dt) + 1 entries.
[[nodiscard]] std::vector<Eigen::VectorXd> linear_response(const Eigen::MatrixXd& companion,
                                                           const Eigen::VectorXd& x0, double horizon, double dt);

/// Plant state whose lateral chain (at hover thrust, zero yaw and
/// altitude error) equals `chain` = [x, x', x'', x''', y, y', y'', y'''].
[[nodiscard]] PlantState lateral_initial_state(const Eigen::Matrix<double, 8, 1>& chain,
                                               const QuadrotorParams& params);

/// x0 is (z, z') for altitude, (psi, psi') for yaw, and the 8-vector
/// above for lateral.
[[nodiscard]] MembershipEntry check_membership(Subsystem subsystem, const Eigen::VectorXd& x0,
                                               const ControllerGains& gains,
                                               const InputConstraintSet& constraints,
                                               const QuadrotorParams& params, const CheckOptions& options);

struct SamplingSpec {
    enum class Kind { grid, uniform_random };
    Kind kind = Kind::grid;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    int points_per_axis = 21;     // grid
    std::size_t count = 0;        // uniform_random
    std::uint64_t seed = 1;       // uniform_random

    void validate(int dimension) const;
};

/// Deterministic sample list for a spec, in index order.
[[nodiscard]] std::vector<Eigen::VectorXd> generate_samples(const SamplingSpec& spec);

struct RoeaReport {
    Subsystem subsystem = Subsystem::yaw;
    std::vector<MembershipEntry> entries;
    std::size_t members = 0;
    std::size_t non_members = 0;
    std::size_t marginal = 0;
    std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> member_bounds;

    [[nodiscard]] double member_fraction() const;
};

/// OpenMP-parallel over samples; entries are keyed by sample index so the
/// report matches estimate_roea_serial exactly.
[[nodiscard]] RoeaReport estimate_roea(Subsystem subsystem, const ControllerGains& gains,
                                       const InputConstraintSet& constraints, const QuadrotorParams& params,
                                       const SamplingSpec& sampling, const CheckOptions& options);

/// Single-threaded reference implementation of estimate_roea.
[[nodiscard]] RoeaReport estimate_roea_serial(Subsystem subsystem, const ControllerGains& gains,
                                              const InputConstraintSet& constraints,
                                              const QuadrotorParams& params, const SamplingSpec& sampling,
                                              const CheckOptions& options);

struct JointInitialCondition {
    Eigen::Vector2d altitude = Eigen::Vector2d::Zero();
    Eigen::Vector2d yaw = Eigen::Vector2d::Zero();
    Eigen::Matrix<double, 8, 1> lateral = Eigen::Matrix<double, 8, 1>::Zero();
};

struct JointReport {
    MembershipEntry altitude;
    MembershipEntry yaw;
    MembershipEntry lateral;

    /// Overall membership is the conjunction of the independent subsystem checks.
    [[nodiscard]] bool member() const;
};

[[nodiscard]] JointReport check_joint(const JointInitialCondition& x0, const ControllerGains& gains,
                                      const InputConstraintSet& constraints, const QuadrotorParams& params,
                                      const CheckOptions& options);

}  // namespace ucfas

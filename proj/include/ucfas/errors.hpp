#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "ucfas/types.hpp"

namespace ucfas {

/// Attitude left the region |phi|, |theta| < pi/2 where the Euler-rate
/// kinematics and the model transformation are defined.
class SingularKinematicsError : public std::runtime_error {
public:
    SingularKinematicsError(const std::string& what, std::optional<PlantState> state = std::nullopt,
                            std::optional<double> time = std::nullopt)
        : std::runtime_error(what), state_(state), time_(time) {}

    [[nodiscard]] const std::optional<PlantState>& state() const { return state_; }
    [[nodiscard]] const std::optional<double>& time() const { return time_; }

private:
    std::optional<PlantState> state_;
    std::optional<double> time_;
};

/// The lateral input matrix G_X is (numerically) singular, typically u0 ~ 0.
class NearSingularInputError : public std::runtime_error {
public:
    NearSingularInputError(const std::string& what, double determinant)
        : std::runtime_error(what), determinant_(determinant) {}

    [[nodiscard]] double determinant() const { return determinant_; }

private:
    double determinant_;
};

/// det V(Z, F) too small for the eigenstructure-assignment solve.
class SingularParameterizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ucfas

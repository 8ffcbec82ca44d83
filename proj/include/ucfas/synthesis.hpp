#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

// Parametric eigenstructure assignment for a fully actuated subsystem of
// order m with r channels,
//   x^(m) + A_0 x + A_1 x' + ... + A_{m-1} x^(m-1) = 0,
// choosing the gain row A = [A_0 ... A_{m-1}] so that the block companion
// matrix of the closed loop equals V F V^-1 with V built from (Z, F).

namespace ucfas {

struct ParametricDesign {
    Eigen::MatrixXd Z;  // r x (m r)
    Eigen::MatrixXd F;  // (m r) x (m r), real diagonal
    int order = 1;      // m
    int channels = 1;   // r

    /// Scalar-channel design with F = diag(poles) and Z a row.
    static ParametricDesign scalar(const Eigen::RowVectorXd& z, const Eigen::VectorXd& poles);

    /// Throws std::invalid_argument on inconsistent dimensions or non-diagonal F.
    void validate() const;

    [[nodiscard]] Eigen::VectorXd poles() const { return F.diagonal(); }
};

struct GainRow {
    Eigen::MatrixXd gains;  // r x (m r), blocks A_0 .. A_{m-1}
    ParametricDesign design;

    [[nodiscard]] int order() const { return design.order; }
    [[nodiscard]] int channels() const { return design.channels; }
};

/// V = [Z; Z F; ...; Z F^{m-1}].
[[nodiscard]] Eigen::MatrixXd build_V(const ParametricDesign& design);

/// A = -Z F^m V^-1. Throws SingularParameterizationError when
/// |det V| < 1e-12 * prod(row norms of V).
[[nodiscard]] GainRow synthesize_gains(const ParametricDesign& design);

/// Block companion matrix: identity blocks on the super-diagonal, last block
/// row -[A_0 ... A_{m-1}].
[[nodiscard]] Eigen::MatrixXd companion(const Eigen::MatrixXd& gains, int channels = 1);
[[nodiscard]] Eigen::MatrixXd companion(const GainRow& row);

/// Monic characteristic polynomial of a scalar-channel gain row, ascending:
/// [A_0, ..., A_{m-1}, 1].
[[nodiscard]] Eigen::VectorXd characteristic_polynomial(const Eigen::RowVectorXd& gains);

/// Roots of a real polynomial given by ascending coefficients (leading
/// coefficient nonzero), by Aberth-Ehrlich simultaneous iteration.
[[nodiscard]] std::vector<std::complex<double>> polynomial_roots(const Eigen::VectorXd& ascending);

/// Largest distance between the closed-loop eigenvalues and the diagonal of
/// F, under the best one-to-one matching.
[[nodiscard]] double verify_spectrum(const Eigen::MatrixXd& gains, const Eigen::MatrixXd& F, int channels = 1);
[[nodiscard]] double verify_spectrum(const GainRow& row);

/// Block-diagonal assembly of per-channel gain rows, e.g. blkdiag(A^x, A^y).
[[nodiscard]] Eigen::MatrixXd block_diagonal(const std::vector<Eigen::MatrixXd>& blocks);

}  // namespace ucfas
